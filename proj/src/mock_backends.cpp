// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/mock_backends.hpp"

#include "zslt/entailment.hpp"
#include "zslt/error.hpp"
#include "zslt/http_backend.hpp"
#include "zslt/text.hpp"

namespace zslt {
namespace {

// Sharpening constant. Arbitrary, frozen by the golden tests.
constexpr double kSharpen = 8.0;

std::string_view label_portion(std::string_view hypothesis) {
  constexpr std::string_view kPrefix = kHypothesisPrefix;
  if (hypothesis.starts_with(kPrefix) && hypothesis.ends_with('.') &&
      hypothesis.size() > kPrefix.size() + 1) {
    return hypothesis.substr(kPrefix.size(), hypothesis.size() - kPrefix.size() - 1);
  }
  return hypothesis;
}

}  // namespace

double mock_overlap(std::string_view premise, std::string_view hypothesis) {
  const auto label_words = text::content_words(label_portion(hypothesis));
  if (label_words.empty()) return 0.0;
  const auto premise_words = text::content_words(premise);
  std::size_t shared = 0;
  for (const auto& w : label_words) shared += premise_words.count(w);
  return static_cast<double>(shared) / static_cast<double>(label_words.size());
}

NliScore mock_nli_score(std::string_view premise, std::string_view hypothesis) {
  const double o = mock_overlap(premise, hypothesis);
  const double denom = 3.0 + kSharpen * o;
  NliScore s;
  s.hypothesis = std::string(hypothesis);
  s.p_entail = (1.0 + kSharpen * o) / denom;
  s.p_contradict = 1.0 / denom;
  s.p_neutral = 1.0 - s.p_entail - s.p_contradict;
  return s;
}

std::vector<NliScore> KeywordNliBackend::score(const NliRequest& request) {
  std::vector<NliScore> out;
  out.reserve(request.hypotheses.size());
  for (const auto& h : request.hypotheses) out.push_back(mock_nli_score(request.premise, h));
  return out;
}

std::vector<std::string> RuleTableGenBackend::generate(const GenRequest& request) {
  const auto prompt = text::fold_case(request.prompt);
  std::vector<std::string> out;
  for (const auto& rule : config_.rules) {
    if (prompt.find(text::fold_case(rule.contains)) != std::string::npos) out.push_back(rule.output);
  }
  if (out.empty() && !config_.fallback.empty()) out.push_back(config_.fallback);
  return out;
}

std::vector<NliScore> FaultInjectingNliBackend::score(const NliRequest& request) {
  if (!trigger_.empty() && request.premise.find(trigger_) != std::string::npos) {
    ++injected_;
    throw Error(code_, "injected fault for premise containing '" + trigger_ + "'");
  }
  return inner_->score(request);
}

std::vector<std::string> FaultInjectingGenBackend::generate(const GenRequest& request) {
  if (!trigger_.empty() && request.prompt.find(trigger_) != std::string::npos) {
    throw Error(code_, "injected fault for prompt containing '" + trigger_ + "'");
  }
  return inner_->generate(request);
}

std::shared_ptr<NliBackend> make_nli_backend(const BackendDescriptor& descriptor) {
  if (descriptor.kind != BackendKind::kNli) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor is not an nli backend");
  }
  if (descriptor.is_mock()) {
    if (descriptor.mock_name() == "keyword") return std::make_shared<KeywordNliBackend>();
    throw Error(ErrorCode::kInvalidArgument, "unknown nli mock '" + descriptor.endpoint + "'");
  }
  return std::make_shared<HttpNliBackend>(descriptor.endpoint, descriptor.timeout_ms);
}

std::shared_ptr<GenBackend> make_gen_backend(const BackendDescriptor& descriptor,
                                             const RuleTableConfig& rules) {
  if (descriptor.kind != BackendKind::kGenerate) {
    throw Error(ErrorCode::kInvalidArgument, "descriptor is not a generate backend");
  }
  if (descriptor.is_mock()) {
    if (descriptor.mock_name() == "rules") return std::make_shared<RuleTableGenBackend>(rules);
    throw Error(ErrorCode::kInvalidArgument, "unknown generate mock '" + descriptor.endpoint + "'");
  }
  return std::make_shared<HttpGenBackend>(descriptor.endpoint, descriptor.timeout_ms);
}

}  // namespace zslt
