// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zslt/taxonomy.hpp"

namespace zslt::io {

enum class RecordFormat { kJsonl, kDelimited };

struct DelimitedOptions {
  char delimiter = '\t';
  std::string path_separator = ">";
  std::string text_column = "text";
  std::string path_column = "label_path";
};

/// One JSON object per line: {"text": str, "label_path": [str, ...]}.
/// Blank lines are skipped. Errors name the 1-based line number.
std::vector<RawSample> read_records_jsonl(std::istream& in);

/// Header row followed by data rows. Fields may be double-quoted; a doubled
/// quote inside a quoted field is a literal quote. The path column is split
/// on `path_separator`.
std::vector<RawSample> read_records_delimited(std::istream& in, const DelimitedOptions& options);

std::vector<RawSample> load_records(const std::filesystem::path& path, RecordFormat format,
                                    const DelimitedOptions& options = {});

RecordFormat parse_record_format(const std::string& name);

/// Refactored dataset: one {"text": str, "label": str} object per line.
LongTailDataset read_dataset_jsonl(std::istream& in);
LongTailDataset load_dataset(const std::filesystem::path& path);
void write_dataset_jsonl(std::ostream& out, const LongTailDataset& dataset);

/// One label per line; blank lines ignored; result sorted and unique.
std::vector<std::string> read_label_space(std::istream& in);
std::vector<std::string> load_label_space(const std::filesystem::path& path);
void write_label_space(std::ostream& out, const std::vector<std::string>& labels);

/// "label<TAB>count" rows, count descending.
void write_distribution_tsv(std::ostream& out, const DistributionSummary& summary);

std::vector<std::string> split_delimited_line(const std::string& line, char delimiter);

}  // namespace zslt::io
