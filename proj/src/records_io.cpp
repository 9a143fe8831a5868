// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/records_io.hpp"

#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <set>

#include "zslt/error.hpp"
#include "zslt/text.hpp"

namespace zslt::io {
namespace {

using nlohmann::json;

[[noreturn]] void malformed(std::size_t line, const std::string& what) {
  throw Error(ErrorCode::kMalformedRecord, "line " + std::to_string(line) + ": " + what);
}

bool blank(const std::string& line) { return text::trim(line).empty(); }

void check_path(std::size_t line, const std::vector<std::string>& path) {
  if (path.empty()) malformed(line, "empty label_path");
  for (std::size_t i = 0; i < path.size(); ++i) {
    if (text::trim(path[i]).empty()) {
      malformed(line, "blank label at path position " + std::to_string(i));
    }
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return in;
}

}  // namespace

std::vector<RawSample> read_records_jsonl(std::istream& in) {
  std::vector<RawSample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) malformed(line_no, "not a JSON object");
    auto t = doc.find("text");
    auto p = doc.find("label_path");
    if (t == doc.end() || !t->is_string()) malformed(line_no, "missing string field 'text'");
    if (p == doc.end() || !p->is_array()) malformed(line_no, "missing array field 'label_path'");
    RawSample rec;
    rec.text = t->get<std::string>();
    for (const auto& e : *p) {
      if (!e.is_string()) malformed(line_no, "label_path elements must be strings");
      rec.label_path.push_back(e.get<std::string>());
    }
    check_path(line_no, rec.label_path);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::string> split_delimited_line(const std::string& line, char delimiter) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      quoted = true;
    } else if (c == delimiter) {
      fields.push_back(std::move(field));
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw Error(ErrorCode::kMalformedRecord, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::vector<RawSample> read_records_delimited(std::istream& in, const DelimitedOptions& options) {
  if (options.path_separator.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "path separator must not be empty");
  }
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!blank(line)) header = split_delimited_line(line, options.delimiter);
  }
  if (header.empty()) return {};

  auto column = [&](const std::string& name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      if (text::trim(header[i]) == name) return i;
    }
    malformed(line_no, "header has no column '" + name + "'");
  };
  const std::size_t text_col = column(options.text_column);
  const std::size_t path_col = column(options.path_column);

  std::vector<RawSample> out;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    std::vector<std::string> fields;
    try {
      fields = split_delimited_line(line, options.delimiter);
    } catch (const Error& e) {
      malformed(line_no, e.detail());
    }
    if (fields.size() != header.size()) {
      malformed(line_no, "expected " + std::to_string(header.size()) + " fields, got " +
                             std::to_string(fields.size()));
    }
    RawSample rec;
    rec.text = fields[text_col];
    const std::string& path = fields[path_col];
    std::size_t start = 0;
    while (true) {
      auto pos = path.find(options.path_separator, start);
      rec.label_path.push_back(path.substr(start, pos == std::string::npos ? pos : pos - start));
      if (pos == std::string::npos) break;
      start = pos + options.path_separator.size();
    }
    check_path(line_no, rec.label_path);
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<RawSample> load_records(const std::filesystem::path& path, RecordFormat format,
                                    const DelimitedOptions& options) {
  auto in = open_input(path);
  try {
    return format == RecordFormat::kJsonl ? read_records_jsonl(in) : read_records_delimited(in, options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kMalformedRecord) throw;
    throw Error(e.code(), path.filename().string() + " " + e.detail());
  }
}

RecordFormat parse_record_format(const std::string& name) {
  if (name == "jsonl") return RecordFormat::kJsonl;
  if (name == "tsv" || name == "csv" || name == "delimited") return RecordFormat::kDelimited;
  throw Error(ErrorCode::kInvalidArgument, "unknown record format '" + name + "'");
}

LongTailDataset read_dataset_jsonl(std::istream& in) {
  LongTailDataset ds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank(line)) continue;
    json doc = json::parse(line, nullptr, false);
    if (doc.is_discarded() || !doc.is_object()) malformed(line_no, "not a JSON object");
    auto t = doc.find("text");
    auto l = doc.find("label");
    if (t == doc.end() || !t->is_string()) malformed(line_no, "missing string field 'text'");
    if (l == doc.end() || !l->is_string()) malformed(line_no, "missing string field 'label'");
    auto label = text::normalize_label(l->get<std::string>());
    if (label.empty()) malformed(line_no, "blank label");
    ds.samples.push_back(LabeledText{{}, t->get<std::string>(), std::move(label)});
  }
  ds.provenance.input_samples = ds.samples.size();
  finalize(ds);
  return ds;
}

LongTailDataset load_dataset(const std::filesystem::path& path) {
  auto in = open_input(path);
  auto ds = read_dataset_jsonl(in);
  ds.provenance.source = path.string();
  return ds;
}

void write_dataset_jsonl(std::ostream& out, const LongTailDataset& dataset) {
  for (const auto& s : dataset.samples) {
    json row = {{"text", s.text}, {"label", s.label}};
    out << row.dump() << '\n';
  }
}

std::vector<std::string> read_label_space(std::istream& in) {
  std::set<std::string> labels;
  std::string line;
  while (std::getline(in, line)) {
    auto label = text::normalize_label(line);
    if (!label.empty()) labels.insert(std::move(label));
  }
  return {labels.begin(), labels.end()};
}

std::vector<std::string> load_label_space(const std::filesystem::path& path) {
  auto in = open_input(path);
  return read_label_space(in);
}

void write_label_space(std::ostream& out, const std::vector<std::string>& labels) {
  for (const auto& l : labels) out << l << '\n';
}

void write_distribution_tsv(std::ostream& out, const DistributionSummary& summary) {
  out << "label\tcount\n";
  for (const auto& row : summary.sorted_descending()) out << row.label << '\t' << row.count << '\n';
}

}  // namespace zslt::io
