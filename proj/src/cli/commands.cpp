// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "zslt/cli.hpp"
#include "zslt/error.hpp"
#include "zslt/evaluation.hpp"
#include "zslt/text.hpp"

namespace zslt::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

std::ofstream open_out(const fs::path& path) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  return out;
}

void write_json_file(const fs::path& path, const json& doc) {
  auto out = open_out(path);
  out << doc.dump(2) << '\n';
}

// Loads raw records (or an already refactored dataset), projects them onto
// leaf labels and applies the optional subsample and label space file.
LongTailDataset build_dataset(const DatasetSpec& spec, const DepthPolicy& policy, std::int64_t seed) {
  LongTailDataset ds;
  if (spec.format == "dataset") {
    ds = io::load_dataset(spec.path);
  } else {
    auto options = spec.delimited;
    const auto format = io::parse_record_format(spec.format);
    auto records = io::load_records(spec.path, format, options);
    try {
      auto taxonomy = parse_taxonomy(records);
      ds = refactor_to_longtail(taxonomy, records, policy, spec.path.filename().string());
    } catch (const Error& e) {
      throw Error(e.code(), spec.path.filename().string() + ": " + e.detail());
    }
  }
  if (spec.sample && *spec.sample < ds.samples.size()) {
    ds = subsample(ds, *spec.sample, static_cast<std::uint64_t>(seed));
  }
  if (spec.label_space) {
    auto labels = io::load_label_space(*spec.label_space);
    for (const auto& s : ds.samples) {
      if (!std::binary_search(labels.begin(), labels.end(), s.label)) {
        throw Error(ErrorCode::kValidation, "gold label '" + s.label + "' of sample " + s.id +
                                                " is missing from " + spec.label_space->string());
      }
    }
    ds.label_space = std::move(labels);
  }
  return ds;
}

json distribution_json(const std::vector<LabelCount>& rows) {
  json arr = json::array();
  for (const auto& r : rows) arr.push_back({{"label", r.label}, {"count", r.count}});
  return arr;
}

void write_dataset_dir(const fs::path& dir, const LongTailDataset& ds, std::size_t m, std::ostream* summary_out) {
  {
    auto out = open_out(dir / "dataset.jsonl");
    io::write_dataset_jsonl(out, ds);
  }
  {
    auto out = open_out(dir / "labels.txt");
    io::write_label_space(out, ds.label_space);
  }
  const auto dist = class_distribution(ds, std::clamp<std::size_t>(m, 1, ds.label_space.size()));
  {
    auto out = open_out(dir / "distribution.tsv");
    io::write_distribution_tsv(out, dist);
  }
  json summary = {{"source", ds.provenance.source},
                  {"depth_policy", ds.provenance.policy.to_string()},
                  {"input_samples", ds.provenance.input_samples},
                  {"dropped_short", ds.provenance.dropped_short},
                  {"samples", ds.samples.size()},
                  {"labels", ds.label_space.size()},
                  {"imbalance_ratio", dist.imbalance_ratio},
                  {"head", distribution_json(dist.head)},
                  {"tail", distribution_json(dist.tail)}};
  write_json_file(dir / "summary.json", summary);

  if (summary_out != nullptr) {
    auto& o = *summary_out;
    o << "samples: " << ds.samples.size() << " (" << ds.provenance.dropped_short << " dropped)\n";
    o << "labels: " << ds.label_space.size() << "\n";
    o << "imbalance ratio: " << format2(dist.imbalance_ratio) << "\n";
    o << "head:\n";
    for (const auto& r : dist.head) o << "  " << r.count << "\t" << r.label << "\n";
    o << "tail:\n";
    for (const auto& r : dist.tail) o << "  " << r.count << "\t" << r.label << "\n";
    o << "wrote " << dir.string() << "\n";
  }
}

PromptCatalog catalog_for(const ExperimentManifest& m) {
  auto catalog = PromptCatalog::builtin();
  if (m.catalog) {
    const auto extra = PromptCatalog::load(*m.catalog);
    for (auto t : extra.templates()) {
      if (!catalog.contains(t.name)) catalog.add(std::move(t));
    }
  }
  return catalog;
}

std::vector<PipelineConfig> configs_from_flag(const std::string& list, const std::string& family) {
  std::vector<PipelineConfig> out;
  const auto builtins = builtin_configs();
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    name = text::trim(name);
    if (name.empty()) continue;
    if (name == "all") {
      for (const auto& [_, c] : builtins) out.push_back(with_family(c, family));
      continue;
    }
    auto it = builtins.find(name);
    if (it == builtins.end()) throw Error(ErrorCode::kValidation, "unknown config '" + name + "'");
    out.push_back(with_family(it->second, family));
  }
  if (out.empty()) throw Error(ErrorCode::kValidation, "--config names no pipeline");
  return out;
}

json result_json(const PipelineResult& r, const std::string& gold, const std::string& config, std::size_t k) {
  json topk = json::array();
  for (std::size_t i = 0; i < r.predictions.size() && i < k; ++i) topk.push_back(r.predictions[i]);
  json doc = {{"input_id", r.input_id},
              {"gold", gold},
              {"topk", topk},
              {"config", config},
              {"trace_ref", config + "/" + r.input_id}};
  if (r.error) doc["error"] = *r.error;
  return doc;
}

json trace_json(const PipelineResult& r, const std::string& config) {
  json stages = json::array();
  for (const auto& t : r.trace) stages.push_back(to_json(t));
  json doc = {{"trace_ref", config + "/" + r.input_id}, {"input_id", r.input_id}, {"stages", stages}};
  if (r.error) doc["error"] = *r.error;
  return doc;
}

int report_error(const Error& e, std::ostream& err) {
  err << "error: " << e.what() << "\n";
  return exit_code_for(e.code());
}

}  // namespace

int cmd_refactor(const RefactorArgs& args, std::ostream& out, std::ostream& err) {
  try {
    ExperimentManifest m;
    if (args.manifest) m = load_manifest(*args.manifest);
    if (args.input) m.dataset.path = *args.input;
    if (m.dataset.path.empty()) throw Error(ErrorCode::kValidation, "no input: pass --input or --manifest");
    if (args.format) {
      m.dataset.format = *args.format;
      if (*args.format == "csv" && !args.delimiter) m.dataset.delimited.delimiter = ',';
    }
    if (m.dataset.format == "dataset") throw Error(ErrorCode::kValidation, "refactor needs raw records");
    if (args.separator) m.dataset.delimited.path_separator = *args.separator;
    if (args.delimiter) {
      if (*args.delimiter == "\\t") {
        m.dataset.delimited.delimiter = '\t';
      } else if (args.delimiter->size() == 1) {
        m.dataset.delimited.delimiter = args.delimiter->front();
      } else {
        throw Error(ErrorCode::kValidation, "--delimiter must be a single character");
      }
    }
    if (args.text_column) m.dataset.delimited.text_column = *args.text_column;
    if (args.path_column) m.dataset.delimited.path_column = *args.path_column;
    if (args.depth_policy) m.depth_policy = DepthPolicy::parse(*args.depth_policy);
    if (args.sample) m.dataset.sample = *args.sample;
    if (args.seed) m.seed = *args.seed;
    if (args.output) m.output_dir = *args.output;
    if (!fs::is_regular_file(m.dataset.path)) {
      throw Error(ErrorCode::kValidation, "input '" + m.dataset.path.string() + "' does not exist");
    }

    auto ds = build_dataset(m.dataset, m.depth_policy, m.seed);
    write_dataset_dir(m.output_dir / "dataset", ds, args.head_tail, &out);
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (!args.manifest) throw Error(ErrorCode::kValidation, "run needs --manifest");
    auto m = load_manifest(*args.manifest);
    if (args.config) m.pipelines = configs_from_flag(*args.config, m.family);
    if (args.parallelism) {
      if (*args.parallelism < 1) throw Error(ErrorCode::kValidation, "--parallelism must be >= 1");
      m.parallelism = *args.parallelism;
    }
    if (args.seed) m.seed = *args.seed;
    if (args.output) m.output_dir = *args.output;
    if (args.nli_endpoint) m.nli.endpoint = *args.nli_endpoint;
    if (args.gen_endpoint) m.gen.endpoint = *args.gen_endpoint;
    const auto env = args.env ? args.env : process_env();
    if (auto v = env("NLI_ENDPOINT")) m.nli.endpoint = *v;
    if (auto v = env("GEN_ENDPOINT")) m.gen.endpoint = *v;
    if (args.mock) {
      m.nli.endpoint = "mock:keyword";
      m.gen.endpoint = "mock:rules";
    }

    const auto catalog = catalog_for(m);
    validate_manifest(m, catalog);

    auto ds = build_dataset(m.dataset, m.depth_policy, m.seed);
    write_dataset_dir(m.output_dir / "dataset", ds, 5, nullptr);

    Gateways gateways{std::make_shared<NliGateway>(m.nli, make_nli_backend(m.nli)),
                      std::make_shared<GenGateway>(m.gen, make_gen_backend(m.gen, m.mock_rules))};
    std::map<std::string, std::string> gold;
    for (const auto& s : ds.samples) gold[s.id] = s.label;
    const std::size_t k = static_cast<std::size_t>(*std::max_element(m.evaluation.ks.begin(), m.evaluation.ks.end()));

    int status = kExitOk;
    for (const auto& config : m.pipelines) {
      const auto dir = m.output_dir / "runs" / config.name;
      const auto started = utc_now();
      std::vector<PipelineResult> results;
      std::optional<std::string> aborted;
      BatchOptions options;
      options.parallelism = m.parallelism;
      options.seed = m.seed;
      try {
        results = run_batch(config, ds, gateways, catalog, options);
      } catch (const BatchAborted& e) {
        results = e.partial();
        aborted = e.what();
      }

      std::size_t failed = 0;
      {
        auto res_out = open_out(dir / "results.jsonl");
        auto trace_out = open_out(dir / "traces.jsonl");
        for (const auto& r : results) {
          if (r.failed()) ++failed;
          res_out << result_json(r, gold.at(r.input_id), config.name, k).dump() << '\n';
          trace_out << trace_json(r, config.name).dump() << '\n';
        }
      }
      json meta = {{"config", to_json(config)},
                   {"manifest", m.source.string()},
                   {"dataset", m.dataset.path.string()},
                   {"samples", ds.samples.size()},
                   {"completed", results.size()},
                   {"failed", failed},
                   {"seed", m.seed},
                   {"parallelism", m.parallelism},
                   {"nli_endpoint", m.nli.endpoint},
                   {"gen_endpoint", m.gen.endpoint},
                   {"started_at", started},
                   {"finished_at", utc_now()}};
      if (aborted) meta["aborted"] = *aborted;
      write_json_file(dir / "metadata.json", meta);

      if (aborted) {
        err << "error: " << config.name << ": " << *aborted << "\n";
        status = kExitRuntime;
        continue;
      }
      if (!args.quiet) {
        out << config.name << ": " << results.size() << " samples, " << failed << " failed -> " << dir.string()
            << "\n";
      }
    }
    return status;
  } catch (const Error& e) {
    return report_error(e, err);
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  try {
    std::optional<ExperimentManifest> m;
    if (args.manifest) m = load_manifest(*args.manifest);

    std::vector<fs::path> runs = args.runs;
    if (runs.empty() && m) {
      for (const auto& p : m->pipelines) runs.push_back(m->output_dir / "runs" / p.name);
    }
    if (runs.empty()) throw Error(ErrorCode::kValidation, "no runs to evaluate");

    std::vector<std::string> labels;
    if (args.labels) {
      labels = io::load_label_space(*args.labels);
    } else if (m && fs::is_regular_file(m->output_dir / "dataset" / "labels.txt")) {
      labels = io::load_label_space(m->output_dir / "dataset" / "labels.txt");
    }

    std::vector<int> ks = args.ks;
    if (ks.empty()) ks = m ? m->evaluation.ks : std::vector<int>{1, 3, 5};
    for (int k : ks) {
      if (k < 1) throw Error(ErrorCode::kValidation, "--k values must be >= 1");
    }
    const double tolerance = args.tolerance.value_or(m ? m->evaluation.tolerance : 0.06);
    std::optional<fs::path> reference_path = args.reference;
    if (!reference_path && m) reference_path = m->evaluation.reference;
    std::string dataset = args.dataset.value_or(m ? m->evaluation.reference_dataset : "");
    std::optional<fs::path> out_dir = args.output;
    if (!out_dir && m) out_dir = m->output_dir / "reports";

    std::optional<ReferenceTable> reference;
    if (reference_path) reference = ReferenceTable::load(*reference_path);

    std::vector<MetricsReport> reports;
    std::vector<DiffRow> diffs;
    for (auto path : runs) {
      if (fs::is_directory(path)) path /= "results.jsonl";
      auto file = load_run_records(path, labels);
      auto report = evaluate(file.run, ks);
      report.dataset = dataset;
      report.config = file.config.empty() ? path.parent_path().filename().string() : file.config;
      if (out_dir) write_json_file(*out_dir / (report.config + ".metrics.json"), to_json(report));
      if (reference) {
        auto rows = compare_to_reference(report, *reference, tolerance);
        diffs.insert(diffs.end(), rows.begin(), rows.end());
      }
      reports.push_back(std::move(report));
    }

    write_report_text(out, reports);
    if (reference) {
      out << "\n";
      write_diff_tsv(out, diffs);
      if (out_dir) {
        auto diff_out = open_out(*out_dir / "diff.tsv");
        write_diff_tsv(diff_out, diffs);
      }
    }
    const auto outside =
        std::count_if(diffs.begin(), diffs.end(), [](const DiffRow& d) { return !d.within_tolerance; });
    if (outside > 0) {
      err << outside << " cell(s) differ from the reference by more than " << tolerance << "\n";
      if (args.strict) return kExitValidation;
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int cmd_report(const ReportArgs& args, std::ostream& out, std::ostream& err) {
  try {
    if (args.format != "text" && args.format != "tsv") {
      throw Error(ErrorCode::kValidation, "--format must be text or tsv");
    }
    std::optional<ReferenceTable> reference;
    if (args.reference) reference = ReferenceTable::load(*args.reference);

    std::vector<MetricsReport> reports;
    for (const auto& path : args.reports) {
      std::ifstream in(path);
      if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
      auto doc = json::parse(in, nullptr, false);
      if (doc.is_discarded()) throw Error(ErrorCode::kSchemaMismatch, path.string() + ": not JSON");
      reports.push_back(metrics_report_from_json(doc));
    }
    if (reports.empty()) {
      if (!reference) throw Error(ErrorCode::kValidation, "nothing to report: pass metrics files or --reference");
      auto datasets = args.dataset ? std::vector<std::string>{*args.dataset} : reference->datasets();
      for (const auto& d : datasets) {
        for (const auto& c : reference->configs(d)) reports.push_back(reference->report_for(d, c));
      }
      if (reports.empty()) throw Error(ErrorCode::kValidation, "reference has no rows for that dataset");
    }
    if (args.format == "tsv") {
      write_report_tsv(out, reports);
    } else {
      write_report_text(out, reports);
    }
    if (reference && !args.reports.empty()) {
      std::vector<DiffRow> diffs;
      for (auto r : reports) {
        if (args.dataset) r.dataset = *args.dataset;
        auto rows = compare_to_reference(r, *reference, args.tolerance);
        diffs.insert(diffs.end(), rows.begin(), rows.end());
      }
      out << "\n";
      write_diff_tsv(out, diffs);
      const bool outside =
          std::any_of(diffs.begin(), diffs.end(), [](const DiffRow& d) { return !d.within_tolerance; });
      if (outside && args.strict) return kExitValidation;
    }
    return kExitOk;
  } catch (const Error& e) {
    return report_error(e, err);
  }
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Zero-shot long-tail text classification with entailment and generation stages"};
  app.name("zslt");
  app.require_subcommand(1);

  RefactorArgs refactor;
  std::string refactor_input, refactor_manifest, refactor_output;
  auto* rc = app.add_subcommand("refactor", "Flatten a label hierarchy into a single-label dataset");
  rc->add_option("--manifest", refactor_manifest, "Experiment manifest");
  rc->add_option("--input", refactor_input, "Raw records file");
  rc->add_option("--format", refactor.format, "jsonl, tsv or csv")->check(CLI::IsMember({"jsonl", "tsv", "csv"}));
  rc->add_option("--separator", refactor.separator, "Path separator in delimited files");
  rc->add_option("--delimiter", refactor.delimiter, "Field delimiter in delimited files");
  rc->add_option("--text-column", refactor.text_column);
  rc->add_option("--path-column", refactor.path_column);
  rc->add_option("--depth", refactor.depth_policy, "max_depth or fixed_depth:N");
  rc->add_option("--sample", refactor.sample, "Seeded subsample size")->check(CLI::PositiveNumber);
  rc->add_option("--seed", refactor.seed);
  rc->add_option("--output", refactor_output, "Output directory");
  rc->add_option("--top", refactor.head_tail, "Head and tail rows in the summary")->check(CLI::PositiveNumber);

  RunArgs run;
  std::string run_manifest, run_output;
  auto* rn = app.add_subcommand("run", "Run pipeline configurations over a dataset");
  rn->add_option("--manifest", run_manifest, "Experiment manifest")->required();
  rn->add_option("--config", run.config, "Builtin config names, comma separated, or 'all'");
  rn->add_option("--parallelism", run.parallelism);
  rn->add_option("--seed", run.seed);
  rn->add_option("--output", run_output, "Output directory");
  rn->add_option("--nli-endpoint", run.nli_endpoint);
  rn->add_option("--gen-endpoint", run.gen_endpoint);
  rn->add_flag("--mock", run.mock, "Use in-process mock backends");
  rn->add_flag("--quiet", run.quiet);

  EvalArgs eval;
  std::string eval_manifest, eval_labels, eval_reference, eval_output;
  std::vector<std::string> eval_runs;
  auto* ev = app.add_subcommand("eval", "Compute top-k accuracy and macro F1 for completed runs");
  ev->add_option("runs", eval_runs, "results.jsonl files or run directories");
  ev->add_option("--manifest", eval_manifest);
  ev->add_option("--labels", eval_labels, "Label space file");
  ev->add_option("--reference", eval_reference, "Reference TSV");
  ev->add_option("--dataset", eval.dataset, "Dataset key in the reference");
  ev->add_option("--tolerance", eval.tolerance);
  ev->add_option("--k", eval.ks)->delimiter(',');
  ev->add_option("--output", eval_output, "Report directory");
  ev->add_flag("--strict", eval.strict, "Exit 2 when a cell is outside tolerance");

  ReportArgs report;
  std::string report_reference;
  std::vector<std::string> report_files;
  auto* rp = app.add_subcommand("report", "Render metrics reports or the reference table");
  rp->add_option("reports", report_files, "Metrics JSON files");
  rp->add_option("--reference", report_reference);
  rp->add_option("--dataset", report.dataset);
  rp->add_option("--tolerance", report.tolerance);
  rp->add_option("--format", report.format)->check(CLI::IsMember({"text", "tsv"}));
  rp->add_flag("--strict", report.strict);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto opt_path = [](const std::string& s) -> std::optional<fs::path> {
    if (s.empty()) return std::nullopt;
    return fs::path(s);
  };

  if (rc->parsed()) {
    refactor.manifest = opt_path(refactor_manifest);
    refactor.input = opt_path(refactor_input);
    refactor.output = opt_path(refactor_output);
    return cmd_refactor(refactor, out, err);
  }
  if (rn->parsed()) {
    run.manifest = opt_path(run_manifest);
    run.output = opt_path(run_output);
    return cmd_run(run, out, err);
  }
  if (ev->parsed()) {
    eval.manifest = opt_path(eval_manifest);
    eval.labels = opt_path(eval_labels);
    eval.reference = opt_path(eval_reference);
    eval.output = opt_path(eval_output);
    for (const auto& r : eval_runs) eval.runs.emplace_back(r);
    return cmd_eval(eval, out, err);
  }
  report.reference = opt_path(report_reference);
  for (const auto& r : report_files) report.reports.emplace_back(r);
  return cmd_report(report, out, err);
}

}  // namespace zslt::cli
