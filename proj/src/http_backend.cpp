// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/http_backend.hpp"

#include <httplib.h>

#include <chrono>

#include "zslt/error.hpp"

namespace zslt {

using nlohmann::json;

namespace wire {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kProtocolError, what); }

const json& field(const json& obj, const char* name) {
  if (!obj.is_object()) bad("expected a JSON object");
  auto it = obj.find(name);
  if (it == obj.end()) bad(std::string("missing field '") + name + "'");
  return *it;
}

std::string string_field(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double number_field(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number()) bad(std::string("field '") + name + "' must be a number");
  return v.get<double>();
}

int int_field(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_number_integer()) bad(std::string("field '") + name + "' must be an integer");
  return v.get<int>();
}

std::vector<std::string> string_array(const json& obj, const char* name) {
  const auto& v = field(obj, name);
  if (!v.is_array()) bad(std::string("field '") + name + "' must be an array");
  std::vector<std::string> out;
  for (const auto& e : v) {
    if (!e.is_string()) bad(std::string("field '") + name + "' must contain strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

}  // namespace

json encode(const NliRequest& request) {
  return {{"premise", request.premise}, {"hypotheses", request.hypotheses}};
}

json encode(const GenRequest& request) {
  json body = {{"prompt", request.prompt},
               {"n", request.n},
               {"max_new_tokens", request.max_new_tokens},
               {"temperature", request.temperature}};
  body["seed"] = request.seed ? json(*request.seed) : json(nullptr);
  return body;
}

json encode_nli_response(const std::vector<NliScore>& scores) {
  json arr = json::array();
  for (const auto& s : scores) {
    arr.push_back({{"hypothesis", s.hypothesis},
                   {"entailment", s.p_entail},
                   {"neutral", s.p_neutral},
                   {"contradiction", s.p_contradict}});
  }
  return {{"scores", std::move(arr)}};
}

json encode_gen_response(const std::vector<std::string>& outputs) { return {{"outputs", outputs}}; }

NliRequest decode_nli_request(const json& body) {
  return NliRequest{string_field(body, "premise"), string_array(body, "hypotheses")};
}

GenRequest decode_gen_request(const json& body) {
  GenRequest r;
  r.prompt = string_field(body, "prompt");
  r.n = int_field(body, "n");
  r.max_new_tokens = int_field(body, "max_new_tokens");
  r.temperature = number_field(body, "temperature");
  const auto& seed = field(body, "seed");
  if (seed.is_number_integer()) {
    r.seed = seed.get<std::int64_t>();
  } else if (!seed.is_null()) {
    bad("field 'seed' must be an integer or null");
  }
  return r;
}

std::vector<NliScore> decode_nli_response(const json& body) {
  const auto& arr = field(body, "scores");
  if (!arr.is_array()) bad("field 'scores' must be an array");
  std::vector<NliScore> out;
  for (const auto& e : arr) {
    NliScore s;
    s.hypothesis = string_field(e, "hypothesis");
    s.p_entail = number_field(e, "entailment");
    s.p_neutral = number_field(e, "neutral");
    s.p_contradict = number_field(e, "contradiction");
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> decode_gen_response(const json& body) { return string_array(body, "outputs"); }

}  // namespace wire

Endpoint parse_endpoint(const std::string& url) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint must be an http:// URL or mock:<name>, got '" + url + "'");
  }
  const auto slash = url.find('/', scheme.size());
  Endpoint ep;
  ep.scheme_host_port = url.substr(0, slash);
  if (ep.scheme_host_port.size() == scheme.size()) {
    throw Error(ErrorCode::kInvalidArgument, "endpoint has no host: '" + url + "'");
  }
  if (slash != std::string::npos) {
    ep.base_path = url.substr(slash);
    while (!ep.base_path.empty() && ep.base_path.back() == '/') ep.base_path.pop_back();
  }
  return ep;
}

json post_json(const Endpoint& endpoint, const std::string& path, const json& body, int timeout_ms) {
  httplib::Client client(endpoint.scheme_host_port);
  const auto timeout = std::chrono::milliseconds(timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);

  const std::string target = endpoint.base_path + path;
  const auto start = std::chrono::steady_clock::now();
  auto res = client.Post(target, body.dump(), "application/json");
  const auto elapsed = std::chrono::steady_clock::now() - start;

  if (!res) {
    const std::string what = target + ": " + httplib::to_string(res.error());
    if (res.error() == httplib::Error::ConnectionTimeout || elapsed >= timeout) {
      throw Error(ErrorCode::kTimeout, what);
    }
    throw Error(ErrorCode::kTransport, what);
  }

  if (res->status != 200) {
    std::string message = "HTTP " + std::to_string(res->status);
    auto err = json::parse(res->body, nullptr, false);
    if (!err.is_discarded() && err.is_object() && err.contains("error") && err["error"].is_string()) {
      message += ": " + err["error"].get<std::string>();
    }
    message = target + ": " + message;
    if (res->status == 504) throw Error(ErrorCode::kTimeout, message);
    if (res->status == 502 || res->status == 503) throw Error(ErrorCode::kTransport, message);
    throw Error(ErrorCode::kBackendRejected, message);
  }

  auto parsed = json::parse(res->body, nullptr, false);
  if (parsed.is_discarded()) throw Error(ErrorCode::kProtocolError, target + ": response is not JSON");
  return parsed;
}

std::vector<NliScore> HttpNliBackend::score(const NliRequest& request) {
  return wire::decode_nli_response(post_json(endpoint_, "/v1/nli", wire::encode(request), timeout_ms_));
}

std::vector<std::string> HttpGenBackend::generate(const GenRequest& request) {
  return wire::decode_gen_response(post_json(endpoint_, "/v1/generate", wire::encode(request), timeout_ms_));
}

}  // namespace zslt
