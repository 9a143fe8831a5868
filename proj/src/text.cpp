// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/text.hpp"

#include <algorithm>
#include <array>

#include "zslt/error.hpp"

namespace zslt {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kMalformedRecord: return "MalformedRecord";
    case ErrorCode::kUnknownPath: return "UnknownPath";
    case ErrorCode::kEmptyResult: return "EmptyResult";
    case ErrorCode::kTransport: return "TransportError";
    case ErrorCode::kTimeout: return "Timeout";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kBackendRejected: return "BackendRejected";
    case ErrorCode::kProtocolError: return "ProtocolError";
    case ErrorCode::kEmptyGeneration: return "EmptyGeneration";
    case ErrorCode::kPlaceholderMismatch: return "PlaceholderMismatch";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kStageError: return "StageError";
    case ErrorCode::kBatchAborted: return "BatchAborted";
    case ErrorCode::kEmptyRun: return "EmptyRun";
    case ErrorCode::kMissingK: return "MissingK";
    case ErrorCode::kSchemaMismatch: return "SchemaMismatch";
    case ErrorCode::kValidation: return "ValidationError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Error";
}

namespace text {
namespace {

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c >= 0x80;
}

// Sorted for binary search.
constexpr std::array<std::string_view, 30> kStopwords = {
    "about", "an",   "and",  "are", "as",    "at",   "be",   "been", "but",  "by",
    "for",   "from", "has",  "have", "in",   "into", "is",   "it",   "its",  "of",
    "on",    "or",   "than", "that", "the",  "this", "to",   "was",  "were", "with",
};

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(s[b])) ++b;
  while (e > b && is_space(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string normalize_label(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(c);
  }
  return out;
}

std::string fold_case(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return out;
}

std::string fold_normalized(std::string_view s) { return fold_case(normalize_label(s)); }

bool is_stopword(std::string_view word) {
  return std::binary_search(kStopwords.begin(), kStopwords.end(), word);
}

std::set<std::string> content_words(std::string_view s) {
  std::set<std::string> words;
  std::string current;
  auto flush = [&] {
    if (utf8_length(current) > 1 && !is_stopword(current)) words.insert(current);
    current.clear();
  };
  for (char c : s) {
    auto u = static_cast<unsigned char>(c);
    if (is_word_byte(u)) {
      current.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a') : c);
    } else {
      flush();
    }
  }
  flush();
  return words;
}

std::size_t utf8_length(std::string_view s) {
  return static_cast<std::size_t>(std::count_if(
      s.begin(), s.end(), [](char c) { return (static_cast<unsigned char>(c) & 0xC0) != 0x80; }));
}

Truncation truncate_head(std::string_view s, std::size_t max_chars) {
  if (max_chars == 0 || utf8_length(s) <= max_chars) return {std::string(s), false};

  // Byte offset of the first code point past the limit.
  std::size_t cut = 0;
  std::size_t seen = 0;
  for (; cut < s.size(); ++cut) {
    if ((static_cast<unsigned char>(s[cut]) & 0xC0) != 0x80) {
      if (seen == max_chars) break;
      ++seen;
    }
  }

  std::size_t end = cut;
  if (!is_space(s[cut])) {
    std::size_t ws = std::string_view::npos;
    for (std::size_t i = cut; i > 0; --i) {
      if (is_space(s[i - 1])) {
        ws = i - 1;
        break;
      }
    }
    if (ws != std::string_view::npos) end = ws;
  }
  while (end > 0 && is_space(s[end - 1])) --end;
  return {std::string(s.substr(0, end)), true};
}

}  // namespace text
}  // namespace zslt
