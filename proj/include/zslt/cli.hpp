// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Experiment manifests and the refactor / run / eval / report commands.
//
// Precedence for run settings: environment (NLI_ENDPOINT, GEN_ENDPOINT) over
// command-line flags over the manifest. --mock forces mock backends and wins
// over everything.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zslt/gateway.hpp"
#include "zslt/mock_backends.hpp"
#include "zslt/pipeline.hpp"
#include "zslt/records_io.hpp"
#include "zslt/taxonomy.hpp"

namespace zslt::cli {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitRuntime = 3 };

int exit_code_for(ErrorCode code);

using EnvLookup = std::function<std::optional<std::string>(const std::string&)>;
EnvLookup process_env();

struct DatasetSpec {
  std::filesystem::path path;
  std::string format = "jsonl";  // jsonl | tsv | csv (raw records) or dataset (refactored)
  io::DelimitedOptions delimited;
  std::optional<std::filesystem::path> label_space;
  std::optional<std::size_t> sample;  // seeded uniform subsample size
};

struct EvaluationSpec {
  std::vector<int> ks = {1, 3, 5};
  double tolerance = 0.06;
  std::optional<std::filesystem::path> reference;
  std::string reference_dataset;
};

struct ExperimentManifest {
  std::filesystem::path source;  // manifest file, empty for synthesized manifests
  DatasetSpec dataset;
  DepthPolicy depth_policy = DepthPolicy::max_depth();
  std::string family = "wos";
  std::vector<PipelineConfig> pipelines;
  std::optional<std::filesystem::path> catalog;
  BackendDescriptor nli{BackendKind::kNli, "mock:keyword"};
  BackendDescriptor gen{BackendKind::kGenerate, "mock:rules"};
  RuleTableConfig mock_rules;
  int parallelism = 1;
  std::int64_t seed = 0;
  EvaluationSpec evaluation;
  std::filesystem::path output_dir = "out";
};

/// Parses and validates a manifest document. Relative paths resolve against
/// `base_dir`. Throws Error(kValidation) naming the offending field.
ExperimentManifest parse_manifest(const std::string& document, const std::filesystem::path& base_dir);
ExperimentManifest load_manifest(const std::filesystem::path& path);

/// Checks that referenced files exist and the pipelines are runnable.
void validate_manifest(const ExperimentManifest& manifest, const PromptCatalog& catalog);

struct RefactorArgs {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::filesystem::path> input;
  std::optional<std::string> format;
  std::optional<std::string> separator;
  std::optional<std::string> delimiter;
  std::optional<std::string> text_column;
  std::optional<std::string> path_column;
  std::optional<std::string> depth_policy;
  std::optional<std::size_t> sample;
  std::optional<std::int64_t> seed;
  std::optional<std::filesystem::path> output;
  std::size_t head_tail = 5;
};

struct RunArgs {
  std::optional<std::filesystem::path> manifest;
  std::optional<std::string> config;  // builtin name(s), comma separated
  std::optional<int> parallelism;
  std::optional<std::int64_t> seed;
  std::optional<std::filesystem::path> output;
  std::optional<std::string> nli_endpoint;
  std::optional<std::string> gen_endpoint;
  bool mock = false;
  bool quiet = false;
  EnvLookup env;
};

struct EvalArgs {
  std::optional<std::filesystem::path> manifest;
  std::vector<std::filesystem::path> runs;  // results.jsonl files or run directories
  std::optional<std::filesystem::path> labels;
  std::optional<std::filesystem::path> reference;
  std::optional<std::string> dataset;
  std::optional<double> tolerance;
  std::vector<int> ks;
  std::optional<std::filesystem::path> output;
  bool strict = false;
};

struct ReportArgs {
  std::vector<std::filesystem::path> reports;  // metrics JSON files from eval
  std::optional<std::filesystem::path> reference;
  std::optional<std::string> dataset;
  double tolerance = 0.06;
  std::string format = "text";  // text | tsv
  bool strict = false;
};

int cmd_refactor(const RefactorArgs& args, std::ostream& out, std::ostream& err);
int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err);
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err);

/// Full command-line entry point.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace zslt::cli
