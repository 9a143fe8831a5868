// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Closed-label-space zero-shot classification by entailment: every label
// becomes a hypothesis about the input text and labels are ranked by how
// strongly the text entails them.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "zslt/gateway.hpp"

namespace zslt {

inline constexpr std::string_view kHypothesisPrefix = "This text is related to ";

/// "This text is related to {label}." Throws kInvalidArgument on an empty label.
std::string build_hypothesis(std::string_view label);

struct RankedLabel {
  std::string label;
  double score = 0.0;

  friend bool operator==(const RankedLabel&, const RankedLabel&) = default;
};

struct RankedPrediction {
  std::string input_id;
  std::vector<RankedLabel> ranking;  // score descending, ties by label
  std::string premise_used;          // after templating and truncation
  bool premise_truncated = false;

  friend bool operator==(const RankedPrediction&, const RankedPrediction&) = default;
};

/// p_entail / (p_entail + p_contradict); 0.5 when both are zero.
double entail_score(const NliScore& score);

/// Substitutes {X} once into `pattern`; an absent template is the identity.
std::string render_premise(std::string_view text, const std::optional<std::string>& pattern);

/// Scores every label in one gateway request and ranks them. Gateway errors
/// are rethrown with the input id prepended.
RankedPrediction classify(const NliGateway& gateway, std::string_view input_id, std::string_view text,
                          const std::vector<std::string>& label_space,
                          const std::optional<std::string>& premise_template = std::nullopt);

/// First k labels of the ranking; requires 1 <= k <= ranking size.
std::vector<std::string> top_k(const RankedPrediction& prediction, std::size_t k);

}  // namespace zslt
