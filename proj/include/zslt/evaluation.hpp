// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Top-k accuracy and macro F1 at k over completed runs, averaging over
// k = 1, 3, 5, and comparison against published reference values.

#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace zslt {

struct RunRecord {
  std::string input_id;
  std::string gold;
  std::vector<std::string> topk;  // empty for failed or fully ungrounded samples
  bool failed = false;
};

struct LabeledRun {
  std::vector<RunRecord> records;
  std::vector<std::string> label_space;  // sorted, unique

  /// Throws kSchemaMismatch when a gold label is outside the label space or a
  /// top-k list repeats a label.
  void validate() const;
};

/// 100 * (#records with gold in the first min(k, |topk|) labels) / #records.
double top_k_accuracy(const LabeledRun& run, std::size_t k);

/// Macro F1 (percent) with effective prediction = gold if gold is in the
/// first k labels, else the rank-1 label (none when topk is empty). The mean
/// runs over classes that occur as gold; F1 = 2TP / (2TP + FP + FN).
double macro_f1_at_k(const LabeledRun& run, std::size_t k);

struct KMetrics {
  double accuracy = 0.0;
  double macro_f1 = 0.0;

  friend bool operator==(const KMetrics&, const KMetrics&) = default;
};

/// Arithmetic mean over k = 1, 3, 5; throws kMissingK if any is absent.
KMetrics aggregate(const std::map<int, KMetrics>& per_k);

struct MetricsReport {
  std::string dataset;
  std::string config;
  std::map<int, KMetrics> per_k;
  std::optional<KMetrics> averages;
  std::size_t n_samples = 0;
  std::size_t n_failed = 0;
};

MetricsReport evaluate(const LabeledRun& run, const std::vector<int>& ks = {1, 3, 5});

/// Two decimals, half away from zero.
double round2(double value);
std::string format2(double value);

nlohmann::json to_json(const MetricsReport& report);
MetricsReport metrics_report_from_json(const nlohmann::json& doc);

/// Human-readable table, and a tab-separated form with the same rows.
void write_report_text(std::ostream& out, const std::vector<MetricsReport>& reports);
void write_report_tsv(std::ostream& out, const std::vector<MetricsReport>& reports);

/// Keyed by (dataset, config, k) where k is "1", "3", "5" or "avg".
struct ReferenceRow {
  std::string dataset;
  std::string config;
  std::string k;
  KMetrics values;
};

class ReferenceTable {
 public:
  /// Tab-separated: dataset, config, k, accuracy, macro_f1. Lines starting
  /// with '#' are comments; a header row starting with "dataset" is skipped.
  static ReferenceTable parse(std::istream& in);
  static ReferenceTable load(const std::filesystem::path& path);

  void add(ReferenceRow row);
  [[nodiscard]] const std::vector<ReferenceRow>& rows() const noexcept { return rows_; }
  [[nodiscard]] std::optional<KMetrics> find(const std::string& dataset, const std::string& config,
                                             const std::string& k) const;
  [[nodiscard]] std::vector<std::string> datasets() const;
  [[nodiscard]] std::vector<std::string> configs(const std::string& dataset) const;

  /// MetricsReport built from the per-k rows of one (dataset, config).
  [[nodiscard]] MetricsReport report_for(const std::string& dataset, const std::string& config) const;

 private:
  std::vector<ReferenceRow> rows_;
};

struct DiffRow {
  std::string dataset;
  std::string config;
  std::string k;
  std::string metric;  // "accuracy" or "macro_f1"
  double computed = 0.0;
  double reference = 0.0;
  double delta = 0.0;  // computed - reference
  bool within_tolerance = true;
};

/// One row per (k, metric) cell that has a reference value, including the
/// averages. Cells with |delta| > tolerance are flagged.
std::vector<DiffRow> compare_to_reference(const MetricsReport& report, const ReferenceTable& reference,
                                          double tolerance);

void write_diff_tsv(std::ostream& out, const std::vector<DiffRow>& rows);

/// Run records file: one {"input_id", "gold", "topk", "config", ...} per line.
struct RunFile {
  std::string config;
  LabeledRun run;
};

RunFile read_run_records(std::istream& in, const std::vector<std::string>& label_space = {});
RunFile load_run_records(const std::filesystem::path& path, const std::vector<std::string>& label_space = {});

}  // namespace zslt
