// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>

namespace zslt::text {

std::string trim(std::string_view s);

/// Label normalization used everywhere a class name enters the system:
/// trims, collapses internal whitespace runs to a single space and keeps case.
std::string normalize_label(std::string_view s);

/// ASCII lowercase; bytes >= 0x80 pass through untouched.
std::string fold_case(std::string_view s);

/// normalize_label followed by fold_case.
std::string fold_normalized(std::string_view s);

/// Lowercased alphanumeric tokens with stopwords and single-character tokens
/// removed. Non-ASCII bytes count as word characters.
std::set<std::string> content_words(std::string_view s);

bool is_stopword(std::string_view word);

/// Number of UTF-8 code points.
std::size_t utf8_length(std::string_view s);

struct Truncation {
  std::string text;
  bool truncated = false;
};

/// Keeps the head of `s`, at most `max_chars` code points, cutting on the last
/// whitespace boundary inside the limit when one exists. `max_chars == 0`
/// disables truncation.
Truncation truncate_head(std::string_view s, std::size_t max_chars);

}  // namespace zslt::text
