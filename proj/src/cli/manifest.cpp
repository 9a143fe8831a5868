// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <cstdlib>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "zslt/cli.hpp"
#include "zslt/error.hpp"

namespace zslt::cli {

using nlohmann::json;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kEmptyInput:
    case ErrorCode::kMalformedRecord:
    case ErrorCode::kUnknownPath:
    case ErrorCode::kEmptyResult:
    case ErrorCode::kPlaceholderMismatch:
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kEmptyRun:
    case ErrorCode::kMissingK:
    case ErrorCode::kSchemaMismatch:
    case ErrorCode::kValidation:
    case ErrorCode::kIo:
      return kExitValidation;
    default:
      return kExitRuntime;
  }
}

EnvLookup process_env() {
  return [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
}

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::kValidation, "manifest: " + what); }

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    invalid(where + "." + key + " has the wrong type");
  }
}

void parse_backend(const json& doc, BackendDescriptor& d, const std::string& where) {
  if (!doc.is_object()) invalid(where + " must be an object");
  d.endpoint = get_or<std::string>(doc, "endpoint", d.endpoint, where);
  d.max_premise_chars = get_or<std::size_t>(doc, "max_premise_chars", d.max_premise_chars, where);
  d.timeout_ms = get_or<int>(doc, "timeout_ms", d.timeout_ms, where);
  d.max_retries = get_or<int>(doc, "max_retries", d.max_retries, where);
  d.backoff_ms = get_or<int>(doc, "backoff_ms", d.backoff_ms, where);
  d.max_concurrency = get_or<int>(doc, "max_concurrency", d.max_concurrency, where);
  if (d.max_concurrency < 1) invalid(where + ".max_concurrency must be >= 1");
  if (d.max_retries < 0) invalid(where + ".max_retries must be >= 0");
  if (d.timeout_ms < 1) invalid(where + ".timeout_ms must be >= 1");
  if (d.backoff_ms < 0) invalid(where + ".backoff_ms must be >= 0");
}

PipelineConfig pipeline_entry(const json& entry, const std::string& family) {
  if (entry.is_string()) {
    const auto name = entry.get<std::string>();
    auto builtins = builtin_configs();
    auto it = builtins.find(name);
    if (it == builtins.end()) invalid("unknown pipeline '" + name + "'");
    return with_family(it->second, family);
  }
  if (entry.is_object()) return pipeline_config_from_json(entry);
  invalid("pipeline entries must be a builtin name or an inline config object");
}

}  // namespace

ExperimentManifest parse_manifest(const std::string& document, const std::filesystem::path& base_dir) {
  auto doc = json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) invalid("not a JSON object");

  ExperimentManifest m;
  if (!doc.contains("dataset") || !doc["dataset"].is_object()) invalid("'dataset' object is required");
  const auto& ds = doc["dataset"];
  if (!ds.contains("path") || !ds["path"].is_string()) invalid("dataset.path is required");
  m.dataset.path = resolve(base_dir, ds["path"].get<std::string>());
  m.dataset.format = get_or<std::string>(ds, "format", m.dataset.format, "dataset");
  if (m.dataset.format != "jsonl" && m.dataset.format != "tsv" && m.dataset.format != "csv" &&
      m.dataset.format != "dataset") {
    invalid("dataset.format must be jsonl, tsv, csv or dataset");
  }
  if (m.dataset.format == "csv") m.dataset.delimited.delimiter = ',';
  const auto delim = get_or<std::string>(ds, "delimiter", std::string(1, m.dataset.delimited.delimiter), "dataset");
  if (delim.size() != 1) invalid("dataset.delimiter must be a single character");
  m.dataset.delimited.delimiter = delim == "\\t" ? '\t' : delim.front();
  m.dataset.delimited.path_separator = get_or<std::string>(ds, "separator", m.dataset.delimited.path_separator, "dataset");
  m.dataset.delimited.text_column = get_or<std::string>(ds, "text_column", m.dataset.delimited.text_column, "dataset");
  m.dataset.delimited.path_column = get_or<std::string>(ds, "path_column", m.dataset.delimited.path_column, "dataset");
  if (ds.contains("label_space")) {
    m.dataset.label_space = resolve(base_dir, get_or<std::string>(ds, "label_space", "", "dataset"));
  }
  if (ds.contains("sample")) {
    const auto n = get_or<std::int64_t>(ds, "sample", 0, "dataset");
    if (n < 1) invalid("dataset.sample must be >= 1");
    m.dataset.sample = static_cast<std::size_t>(n);
  }

  try {
    m.depth_policy = DepthPolicy::parse(get_or<std::string>(doc, "depth_policy", "max_depth", "manifest"));
  } catch (const Error& e) {
    invalid(e.detail());
  }
  m.family = get_or<std::string>(doc, "family", m.family, "manifest");
  if (m.family != "wos" && m.family != "amazon") invalid("family must be wos or amazon");

  try {
    const json pipeline = doc.contains("pipeline") ? doc["pipeline"] : json("entail_only");
    if (pipeline.is_array()) {
      for (const auto& e : pipeline) m.pipelines.push_back(pipeline_entry(e, m.family));
    } else {
      m.pipelines.push_back(pipeline_entry(pipeline, m.family));
    }
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kValidation) throw;
    invalid(e.detail());
  }
  if (m.pipelines.empty()) invalid("at least one pipeline is required");

  if (doc.contains("catalog")) m.catalog = resolve(base_dir, get_or<std::string>(doc, "catalog", "", "manifest"));

  if (doc.contains("backends")) {
    const auto& b = doc["backends"];
    if (!b.is_object()) invalid("backends must be an object");
    if (b.contains("nli")) parse_backend(b["nli"], m.nli, "backends.nli");
    if (b.contains("generate")) {
      const auto& g = b["generate"];
      parse_backend(g, m.gen, "backends.generate");
      if (g.contains("rules")) {
        if (!g["rules"].is_array()) invalid("backends.generate.rules must be an array");
        for (const auto& r : g["rules"]) {
          if (!r.is_object() || !r.contains("contains") || !r.contains("output") || !r["contains"].is_string() ||
              !r["output"].is_string()) {
            invalid("generate rules need string 'contains' and 'output'");
          }
          m.mock_rules.rules.push_back({r["contains"].get<std::string>(), r["output"].get<std::string>()});
        }
      }
      m.mock_rules.fallback = get_or<std::string>(g, "fallback", m.mock_rules.fallback, "backends.generate");
    }
  }

  m.parallelism = get_or<int>(doc, "parallelism", m.parallelism, "manifest");
  if (m.parallelism < 1) invalid("parallelism must be >= 1");
  m.seed = get_or<std::int64_t>(doc, "seed", m.seed, "manifest");

  if (doc.contains("evaluation")) {
    const auto& e = doc["evaluation"];
    if (!e.is_object()) invalid("evaluation must be an object");
    m.evaluation.ks = get_or<std::vector<int>>(e, "k", m.evaluation.ks, "evaluation");
    for (int k : m.evaluation.ks) {
      if (k < 1) invalid("evaluation.k entries must be >= 1");
    }
    m.evaluation.tolerance = get_or<double>(e, "tolerance", m.evaluation.tolerance, "evaluation");
    if (e.contains("reference")) {
      m.evaluation.reference = resolve(base_dir, get_or<std::string>(e, "reference", "", "evaluation"));
    }
    m.evaluation.reference_dataset = get_or<std::string>(e, "reference_dataset", "", "evaluation");
  }

  m.output_dir = resolve(base_dir, get_or<std::string>(doc, "output_dir", "out", "manifest"));
  return m;
}

ExperimentManifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kValidation, "cannot open manifest " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  auto m = parse_manifest(ss.str(), path.parent_path());
  m.source = path;
  return m;
}

void validate_manifest(const ExperimentManifest& m, const PromptCatalog& catalog) {
  auto must_exist = [](const std::filesystem::path& p, const std::string& what) {
    if (!std::filesystem::is_regular_file(p)) {
      throw Error(ErrorCode::kValidation, "manifest: " + what + " '" + p.string() + "' does not exist");
    }
  };
  must_exist(m.dataset.path, "dataset.path");
  if (m.dataset.label_space) must_exist(*m.dataset.label_space, "dataset.label_space");
  if (m.catalog) must_exist(*m.catalog, "catalog");
  if (m.evaluation.reference) must_exist(*m.evaluation.reference, "evaluation.reference");

  for (const auto& p : m.pipelines) {
    try {
      p.validate(catalog);
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "manifest: " + e.detail());
    }
  }
  for (const auto* d : {&m.nli, &m.gen}) {
    try {
      if (d->kind == BackendKind::kNli) {
        make_nli_backend(*d);
      } else {
        make_gen_backend(*d, m.mock_rules);
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::kValidation, "manifest: " + e.detail());
    }
  }
}

}  // namespace zslt::cli
