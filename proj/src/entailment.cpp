// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/entailment.hpp"

#include <algorithm>

#include "zslt/error.hpp"
#include "zslt/retriever.hpp"
#include "zslt/text.hpp"

namespace zslt {

std::string build_hypothesis(std::string_view label) {
  if (label.empty()) throw Error(ErrorCode::kInvalidArgument, "hypothesis label must be non-empty");
  std::string h(kHypothesisPrefix);
  h += label;
  h += '.';
  return h;
}

double entail_score(const NliScore& score) {
  const double mass = score.p_entail + score.p_contradict;
  return mass > 0.0 ? score.p_entail / mass : 0.5;
}

std::string render_premise(std::string_view text, const std::optional<std::string>& pattern) {
  if (!pattern) return std::string(text);
  return render_pattern(*pattern, {{"X", std::string(text)}});
}

RankedPrediction classify(const NliGateway& gateway, std::string_view input_id, std::string_view text,
                          const std::vector<std::string>& label_space,
                          const std::optional<std::string>& premise_template) {
  if (label_space.empty()) throw Error(ErrorCode::kInvalidArgument, "label space must be non-empty");
  if (text::trim(text).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "sample " + std::string(input_id) + ": empty text");
  }

  NliRequest request;
  request.premise = render_premise(text, premise_template);
  request.hypotheses.reserve(label_space.size());
  for (const auto& label : label_space) request.hypotheses.push_back(build_hypothesis(label));

  NliResult result;
  try {
    result = gateway.score_nli(request);
  } catch (const Error& e) {
    throw Error(e.code(), "sample " + std::string(input_id) + ": " + e.detail());
  }

  RankedPrediction pred;
  pred.input_id = std::string(input_id);
  pred.premise_used = std::move(result.premise_sent);
  pred.premise_truncated = result.truncated;
  pred.ranking.reserve(label_space.size());
  for (std::size_t i = 0; i < label_space.size(); ++i) {
    pred.ranking.push_back({label_space[i], entail_score(result.scores[i])});
  }
  std::sort(pred.ranking.begin(), pred.ranking.end(), [](const RankedLabel& a, const RankedLabel& b) {
    return a.score != b.score ? a.score > b.score : a.label < b.label;
  });
  return pred;
}

std::vector<std::string> top_k(const RankedPrediction& prediction, std::size_t k) {
  if (k < 1 || k > prediction.ranking.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "k must be in [1, " + std::to_string(prediction.ranking.size()) + "]");
  }
  std::vector<std::string> out;
  out.reserve(k);
  for (std::size_t i = 0; i < k; ++i) out.push_back(prediction.ranking[i].label);
  return out;
}

}  // namespace zslt
