// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// JSON-over-HTTP client backends.
//
//   POST /v1/nli       {"premise": str, "hypotheses": [str, ...]}
//                   -> {"scores": [{"hypothesis": str, "entailment": float,
//                                   "neutral": float, "contradiction": float}]}
//   POST /v1/generate  {"prompt": str, "n": int, "max_new_tokens": int,
//                       "temperature": float, "seed": int|null}
//                   -> {"outputs": [str, ...]}
//
// Non-200 responses carry {"error": str}.

#pragma once

#include <nlohmann/json.hpp>
#include <string>
#include <vector>

#include "zslt/gateway.hpp"

namespace zslt {

namespace wire {

nlohmann::json encode(const NliRequest& request);
nlohmann::json encode(const GenRequest& request);
nlohmann::json encode_nli_response(const std::vector<NliScore>& scores);
nlohmann::json encode_gen_response(const std::vector<std::string>& outputs);

/// Throw Error(kProtocolError) on shape violations.
NliRequest decode_nli_request(const nlohmann::json& body);
GenRequest decode_gen_request(const nlohmann::json& body);
std::vector<NliScore> decode_nli_response(const nlohmann::json& body);
std::vector<std::string> decode_gen_response(const nlohmann::json& body);

}  // namespace wire

struct Endpoint {
  std::string scheme_host_port;  // e.g. "http://127.0.0.1:8080"
  std::string base_path;         // "" or "/prefix" without trailing slash
};

Endpoint parse_endpoint(const std::string& url);

/// POSTs `body` to base_path + `path` and returns the parsed 200 body.
/// Connection failures and 502/503 are kTransport, elapsed >= timeout or 504
/// is kTimeout, other statuses are kBackendRejected, and an unparseable 200
/// body is kProtocolError.
nlohmann::json post_json(const Endpoint& endpoint, const std::string& path, const nlohmann::json& body,
                         int timeout_ms);

class HttpNliBackend final : public NliBackend {
 public:
  HttpNliBackend(const std::string& url, int timeout_ms)
      : endpoint_(parse_endpoint(url)), timeout_ms_(timeout_ms) {}
  std::vector<NliScore> score(const NliRequest& request) override;

 private:
  Endpoint endpoint_;
  int timeout_ms_;
};

class HttpGenBackend final : public GenBackend {
 public:
  HttpGenBackend(const std::string& url, int timeout_ms)
      : endpoint_(parse_endpoint(url)), timeout_ms_(timeout_ms) {}
  std::vector<std::string> generate(const GenRequest& request) override;

 private:
  Endpoint endpoint_;
  int timeout_ms_;
};

}  // namespace zslt
