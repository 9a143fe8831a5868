// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "zslt/error.hpp"
#include "zslt/text.hpp"

namespace zslt {

using nlohmann::json;

namespace {

void check_run(const LabeledRun& run, std::size_t k) {
  if (run.records.empty()) throw Error(ErrorCode::kEmptyRun, "run has no records");
  if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
}

bool in_prefix(const std::vector<std::string>& topk, const std::string& label, std::size_t k) {
  const auto end = topk.begin() + static_cast<std::ptrdiff_t>(std::min(k, topk.size()));
  return std::find(topk.begin(), end, label) != end;
}

}  // namespace

void LabeledRun::validate() const {
  for (const auto& r : records) {
    if (!std::binary_search(label_space.begin(), label_space.end(), r.gold)) {
      throw Error(ErrorCode::kSchemaMismatch, "record " + r.input_id + ": gold '" + r.gold + "' not in label space");
    }
    std::set<std::string> seen;
    for (const auto& l : r.topk) {
      if (!seen.insert(l).second) {
        throw Error(ErrorCode::kSchemaMismatch, "record " + r.input_id + ": duplicate label '" + l + "' in topk");
      }
    }
  }
}

double top_k_accuracy(const LabeledRun& run, std::size_t k) {
  check_run(run, k);
  std::size_t hits = 0;
  for (const auto& r : run.records) hits += in_prefix(r.topk, r.gold, k) ? 1 : 0;
  return 100.0 * static_cast<double>(hits) / static_cast<double>(run.records.size());
}

double macro_f1_at_k(const LabeledRun& run, std::size_t k) {
  check_run(run, k);
  struct Counts {
    std::size_t tp = 0, fp = 0, fn = 0;
  };
  std::unordered_map<std::string, Counts> counts;
  std::set<std::string> gold_classes;
  for (const auto& r : run.records) {
    gold_classes.insert(r.gold);
    if (in_prefix(r.topk, r.gold, k)) {
      ++counts[r.gold].tp;
      continue;
    }
    ++counts[r.gold].fn;
    if (!r.topk.empty()) ++counts[r.topk.front()].fp;
  }
  double sum = 0.0;
  for (const auto& c : gold_classes) {
    const auto& n = counts[c];
    const double num = 2.0 * static_cast<double>(n.tp);
    sum += num / (num + static_cast<double>(n.fp) + static_cast<double>(n.fn));
  }
  return 100.0 * sum / static_cast<double>(gold_classes.size());
}

KMetrics aggregate(const std::map<int, KMetrics>& per_k) {
  KMetrics sum;
  for (int k : {1, 3, 5}) {
    auto it = per_k.find(k);
    if (it == per_k.end()) throw Error(ErrorCode::kMissingK, "no metrics for k=" + std::to_string(k));
    sum.accuracy += it->second.accuracy;
    sum.macro_f1 += it->second.macro_f1;
  }
  return {sum.accuracy / 3.0, sum.macro_f1 / 3.0};
}

MetricsReport evaluate(const LabeledRun& run, const std::vector<int>& ks) {
  MetricsReport report;
  report.n_samples = run.records.size();
  report.n_failed = static_cast<std::size_t>(
      std::count_if(run.records.begin(), run.records.end(), [](const RunRecord& r) { return r.failed; }));
  for (int k : ks) {
    if (k < 1) throw Error(ErrorCode::kInvalidArgument, "k must be >= 1");
    const auto uk = static_cast<std::size_t>(k);
    report.per_k[k] = KMetrics{top_k_accuracy(run, uk), macro_f1_at_k(run, uk)};
  }
  if (report.per_k.count(1) && report.per_k.count(3) && report.per_k.count(5)) {
    report.averages = aggregate(report.per_k);
  }
  return report;
}

double round2(double value) { return std::round(value * 100.0) / 100.0; }

std::string format2(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.2f", round2(value));
  return buf;
}

json to_json(const MetricsReport& report) {
  json per_k = json::object();
  for (const auto& [k, m] : report.per_k) {
    per_k[std::to_string(k)] = {{"accuracy", m.accuracy}, {"macro_f1", m.macro_f1}};
  }
  json j = {{"dataset", report.dataset},
            {"config", report.config},
            {"n_samples", report.n_samples},
            {"n_failed", report.n_failed},
            {"per_k", std::move(per_k)}};
  if (report.averages) {
    j["averages"] = {{"accuracy", report.averages->accuracy}, {"macro_f1", report.averages->macro_f1}};
  }
  return j;
}

MetricsReport metrics_report_from_json(const json& doc) {
  MetricsReport r;
  try {
    r.dataset = doc.value("dataset", "");
    r.config = doc.value("config", "");
    r.n_samples = doc.at("n_samples").get<std::size_t>();
    r.n_failed = doc.value("n_failed", std::size_t{0});
    for (const auto& [k, m] : doc.at("per_k").items()) {
      r.per_k[std::stoi(k)] = KMetrics{m.at("accuracy").get<double>(), m.at("macro_f1").get<double>()};
    }
    if (doc.contains("averages")) {
      const auto& a = doc["averages"];
      r.averages = KMetrics{a.at("accuracy").get<double>(), a.at("macro_f1").get<double>()};
    }
  } catch (const std::exception& e) {
    throw Error(ErrorCode::kSchemaMismatch, std::string("metrics report: ") + e.what());
  }
  return r;
}

namespace {

std::vector<int> union_ks(const std::vector<MetricsReport>& reports) {
  std::set<int> ks;
  for (const auto& r : reports) {
    for (const auto& [k, _] : r.per_k) ks.insert(k);
  }
  return {ks.begin(), ks.end()};
}

std::vector<std::vector<std::string>> report_rows(const std::vector<MetricsReport>& reports) {
  const auto ks = union_ks(reports);
  std::vector<std::string> header = {"dataset", "config", "n", "failed"};
  for (int k : ks) {
    header.push_back("top" + std::to_string(k) + "_acc");
    header.push_back("top" + std::to_string(k) + "_f1");
  }
  header.push_back("avg_acc");
  header.push_back("avg_f1");

  std::vector<std::vector<std::string>> rows{header};
  for (const auto& r : reports) {
    std::vector<std::string> row = {r.dataset, r.config, std::to_string(r.n_samples), std::to_string(r.n_failed)};
    for (int k : ks) {
      auto it = r.per_k.find(k);
      row.push_back(it == r.per_k.end() ? "-" : format2(it->second.accuracy));
      row.push_back(it == r.per_k.end() ? "-" : format2(it->second.macro_f1));
    }
    row.push_back(r.averages ? format2(r.averages->accuracy) : "-");
    row.push_back(r.averages ? format2(r.averages->macro_f1) : "-");
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void write_report_text(std::ostream& out, const std::vector<MetricsReport>& reports) {
  const auto rows = report_rows(reports);
  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i > 0) out << "  ";
      if (i < 2) {
        out << std::left << std::setw(static_cast<int>(width[i])) << row[i];
      } else {
        out << std::right << std::setw(static_cast<int>(width[i])) << row[i];
      }
    }
    out << '\n';
  }
  out << std::left;
}

void write_report_tsv(std::ostream& out, const std::vector<MetricsReport>& reports) {
  for (const auto& row : report_rows(reports)) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "\t" : "") << row[i];
    out << '\n';
  }
}

ReferenceTable ReferenceTable::parse(std::istream& in) {
  ReferenceTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = text::trim(line);
    if (trimmed.empty() || trimmed.front() == '#' || trimmed.rfind("dataset\t", 0) == 0) continue;
    std::vector<std::string> f;
    std::stringstream ss(trimmed);
    std::string cell;
    while (std::getline(ss, cell, '\t')) f.push_back(text::trim(cell));
    if (f.size() != 5) {
      throw Error(ErrorCode::kSchemaMismatch, "reference line " + std::to_string(line_no) + ": expected 5 columns");
    }
    try {
      table.add({f[0], f[1], f[2], KMetrics{std::stod(f[3]), std::stod(f[4])}});
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kSchemaMismatch, "reference line " + std::to_string(line_no) + ": bad number");
    }
  }
  return table;
}

ReferenceTable ReferenceTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return parse(in);
}

void ReferenceTable::add(ReferenceRow row) {
  if (row.k != "avg" && row.k != "1" && row.k != "3" && row.k != "5") {
    throw Error(ErrorCode::kSchemaMismatch, "reference k must be 1, 3, 5 or avg, got '" + row.k + "'");
  }
  if (find(row.dataset, row.config, row.k)) {
    throw Error(ErrorCode::kSchemaMismatch,
                "duplicate reference row " + row.dataset + "/" + row.config + "/" + row.k);
  }
  rows_.push_back(std::move(row));
}

std::optional<KMetrics> ReferenceTable::find(const std::string& dataset, const std::string& config,
                                             const std::string& k) const {
  for (const auto& r : rows_) {
    if (r.dataset == dataset && r.config == config && r.k == k) return r.values;
  }
  return std::nullopt;
}

std::vector<std::string> ReferenceTable::datasets() const {
  std::vector<std::string> out;
  for (const auto& r : rows_) {
    if (std::find(out.begin(), out.end(), r.dataset) == out.end()) out.push_back(r.dataset);
  }
  return out;
}

std::vector<std::string> ReferenceTable::configs(const std::string& dataset) const {
  std::vector<std::string> out;
  for (const auto& r : rows_) {
    if (r.dataset == dataset && std::find(out.begin(), out.end(), r.config) == out.end()) out.push_back(r.config);
  }
  return out;
}

MetricsReport ReferenceTable::report_for(const std::string& dataset, const std::string& config) const {
  MetricsReport r;
  r.dataset = dataset;
  r.config = config;
  for (const auto& row : rows_) {
    if (row.dataset == dataset && row.config == config && row.k != "avg") r.per_k[std::stoi(row.k)] = row.values;
  }
  if (r.per_k.count(1) && r.per_k.count(3) && r.per_k.count(5)) r.averages = aggregate(r.per_k);
  return r;
}

std::vector<DiffRow> compare_to_reference(const MetricsReport& report, const ReferenceTable& reference,
                                          double tolerance) {
  std::vector<DiffRow> out;
  auto add = [&](const std::string& k, const KMetrics& computed) {
    auto ref = reference.find(report.dataset, report.config, k);
    if (!ref) return;
    for (const auto& [metric, c, r] : {std::tuple{"accuracy", computed.accuracy, ref->accuracy},
                                       std::tuple{"macro_f1", computed.macro_f1, ref->macro_f1}}) {
      DiffRow row{report.dataset, report.config, k, metric, c, r, c - r, true};
      // Slack absorbs binary representation error of two-decimal values.
      row.within_tolerance = std::abs(row.delta) <= tolerance + 1e-9;
      out.push_back(std::move(row));
    }
  };
  for (const auto& [k, m] : report.per_k) add(std::to_string(k), m);
  if (report.averages) add("avg", *report.averages);
  return out;
}

void write_diff_tsv(std::ostream& out, const std::vector<DiffRow>& rows) {
  out << "dataset\tconfig\tk\tmetric\tcomputed\treference\tdelta\tstatus\n";
  for (const auto& r : rows) {
    char delta[64];
    std::snprintf(delta, sizeof(delta), "%+.4f", r.delta);
    out << r.dataset << '\t' << r.config << '\t' << r.k << '\t' << r.metric << '\t' << format2(r.computed) << '\t'
        << format2(r.reference) << '\t' << delta << '\t' << (r.within_tolerance ? "ok" : "FLAG") << '\n';
  }
}

RunFile read_run_records(std::istream& in, const std::vector<std::string>& label_space) {
  RunFile file;
  std::set<std::string> derived;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    auto doc = json::parse(line, nullptr, false);
    auto bad = [&](const std::string& what) {
      throw Error(ErrorCode::kSchemaMismatch, "run line " + std::to_string(line_no) + ": " + what);
    };
    if (doc.is_discarded() || !doc.is_object()) bad("not a JSON object");
    if (!doc.contains("input_id") || !doc["input_id"].is_string()) bad("missing string 'input_id'");
    if (!doc.contains("gold") || !doc["gold"].is_string()) bad("missing string 'gold'");
    if (!doc.contains("topk") || !doc["topk"].is_array()) bad("missing array 'topk'");
    RunRecord r;
    r.input_id = doc["input_id"].get<std::string>();
    r.gold = doc["gold"].get<std::string>();
    for (const auto& l : doc["topk"]) {
      if (!l.is_string()) bad("topk entries must be strings");
      r.topk.push_back(l.get<std::string>());
    }
    r.failed = doc.contains("error") && !doc["error"].is_null();
    const std::string config = doc.value("config", "");
    if (file.run.records.empty()) {
      file.config = config;
    } else if (config != file.config) {
      bad("config '" + config + "' differs from '" + file.config + "'");
    }
    derived.insert(r.gold);
    for (const auto& l : r.topk) derived.insert(l);
    file.run.records.push_back(std::move(r));
  }
  if (file.run.records.empty()) throw Error(ErrorCode::kEmptyRun, "run file has no records");
  file.run.label_space = label_space.empty() ? std::vector<std::string>(derived.begin(), derived.end()) : label_space;
  std::sort(file.run.label_space.begin(), file.run.label_space.end());
  file.run.validate();
  return file;
}

RunFile load_run_records(const std::filesystem::path& path, const std::vector<std::string>& label_space) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_run_records(in, label_space);
}

}  // namespace zslt
