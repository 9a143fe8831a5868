// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// The generative side of the classifier: renders initialization and priming
// prompts, collects generations, and grounds free-text output against the
// closed label space.

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zslt/gateway.hpp"

namespace zslt {

/// Single-pass substitution of {NAME} tokens for the names in `values`.
/// Substituted text is never rescanned; unknown brace groups are kept.
std::string render_pattern(std::string_view pattern, const std::map<std::string, std::string>& values);

/// Occurrences of {name} in `pattern`.
std::size_t count_placeholder(std::string_view pattern, std::string_view name);

struct PromptTemplate {
  std::string name;
  std::string pattern;  // {X} exactly once, {LABELS} at most once
  std::string domain_hint;

  /// Throws kPlaceholderMismatch when the placeholder counts are wrong.
  void validate() const;
};

class PromptCatalog {
 public:
  /// Initialization prompts for the WOS and Amazon Beauty families.
  static PromptCatalog builtin();

  /// {"templates": [{"name": str, "pattern": str, "domain_hint": str}, ...]}
  static PromptCatalog from_json(const std::string& document);
  static PromptCatalog load(const std::filesystem::path& path);

  void add(PromptTemplate tmpl);
  [[nodiscard]] const PromptTemplate& get(std::string_view name) const;
  [[nodiscard]] bool contains(std::string_view name) const;
  [[nodiscard]] const std::vector<PromptTemplate>& templates() const noexcept { return templates_; }

 private:
  std::vector<PromptTemplate> templates_;
};

/// Exact {X} substitution; the template must not use {LABELS}.
std::string render_init_prompt(std::string_view text, const PromptTemplate& tmpl);

inline constexpr std::string_view kWosPrimedPattern =
    "Here is some text that entails {LABELS}: {X}. What area is this text related to?";
inline constexpr std::string_view kAmazonPrimedPattern =
    "Here is a review that entails {LABELS}: {X}. What product category is this review related to?";

class PrimedFamily {
 public:
  enum class Kind { kWos, kAmazon, kCustom };

  static PrimedFamily wos() { return PrimedFamily(Kind::kWos, std::string(kWosPrimedPattern)); }
  static PrimedFamily amazon() { return PrimedFamily(Kind::kAmazon, std::string(kAmazonPrimedPattern)); }
  /// Requires exactly one {X} and one {LABELS}.
  static PrimedFamily custom(std::string pattern);
  /// "wos", "amazon", or a custom pattern.
  static PrimedFamily parse(const std::string& spec);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] const std::string& pattern() const noexcept { return pattern_; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const PrimedFamily&, const PrimedFamily&) = default;

 private:
  PrimedFamily(Kind kind, std::string pattern) : kind_(kind), pattern_(std::move(pattern)) {}
  Kind kind_;
  std::string pattern_;
};

/// Labels joined with ", " in the given order; 1 to 5 labels.
std::string render_primed_prompt(std::string_view text, const std::vector<std::string>& labels,
                                 const PrimedFamily& family);

/// Delegates to the gateway, trims each output and drops empties and
/// post-trim duplicates.
std::vector<std::string> retrieve(const GenGateway& gateway, const GenRequest& request);

enum class GroundingMethod { kExact, kNormalized, kSubstring, kUngrounded };

std::string_view grounding_method_name(GroundingMethod method);

struct GroundedGeneration {
  std::string raw;
  std::optional<std::string> grounded;  // nullopt means Ungrounded
  GroundingMethod method = GroundingMethod::kUngrounded;

  friend bool operator==(const GroundedGeneration&, const GroundedGeneration&) = default;
};

/// Per generation, in order: exact match; case-insensitive whitespace-
/// normalized match; unique word-bounded containment (the generation
/// contains exactly one label, else exactly one label contains the
/// generation); otherwise Ungrounded.
std::vector<GroundedGeneration> ground_labels(const std::vector<std::string>& generations,
                                              const std::vector<std::string>& label_space);

}  // namespace zslt
