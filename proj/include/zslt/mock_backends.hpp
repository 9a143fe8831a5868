// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Deterministic in-process backends for offline runs and tests.

#pragma once

#include <atomic>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "zslt/gateway.hpp"

namespace zslt {

/// Fraction of the label's content words that also occur in the premise. The
/// label portion is the text between "This text is related to " and the
/// final period when the hypothesis has that shape, otherwise the whole
/// hypothesis. Zero when the label has no content words.
double mock_overlap(std::string_view premise, std::string_view hypothesis);

/// Keyword scorer. With overlap o:
///   p_entail = (1 + 8o) / (3 + 8o), p_contradict = 1 / (3 + 8o),
///   p_neutral = remainder.
NliScore mock_nli_score(std::string_view premise, std::string_view hypothesis);

class KeywordNliBackend final : public NliBackend {
 public:
  std::vector<NliScore> score(const NliRequest& request) override;
};

struct GenRule {
  std::string contains;  // case-insensitive substring of the prompt
  std::string output;
};

struct RuleTableConfig {
  std::vector<GenRule> rules;
  // Emitted when no rule matches; an empty fallback yields no output.
  std::string fallback = "general";
};

/// Emits the outputs of every matching rule in table order.
class RuleTableGenBackend final : public GenBackend {
 public:
  explicit RuleTableGenBackend(RuleTableConfig config) : config_(std::move(config)) {}
  std::vector<std::string> generate(const GenRequest& request) override;

 private:
  RuleTableConfig config_;
};

/// Wraps another backend and fails requests whose premise (or prompt)
/// contains `trigger` with the configured error code.
class FaultInjectingNliBackend final : public NliBackend {
 public:
  FaultInjectingNliBackend(std::shared_ptr<NliBackend> inner, std::string trigger,
                           ErrorCode code = ErrorCode::kTimeout)
      : inner_(std::move(inner)), trigger_(std::move(trigger)), code_(code) {}

  std::vector<NliScore> score(const NliRequest& request) override;
  [[nodiscard]] int injected() const noexcept { return injected_.load(); }

 private:
  std::shared_ptr<NliBackend> inner_;
  std::string trigger_;
  ErrorCode code_;
  std::atomic<int> injected_{0};
};

class FaultInjectingGenBackend final : public GenBackend {
 public:
  FaultInjectingGenBackend(std::shared_ptr<GenBackend> inner, std::string trigger,
                           ErrorCode code = ErrorCode::kTimeout)
      : inner_(std::move(inner)), trigger_(std::move(trigger)), code_(code) {}

  std::vector<std::string> generate(const GenRequest& request) override;

 private:
  std::shared_ptr<GenBackend> inner_;
  std::string trigger_;
  ErrorCode code_;
};

/// Backend factories keyed by descriptor endpoint. Mock names: NLI
/// "mock:keyword"; generation "mock:rules". Anything else must be an
/// http:// URL.
std::shared_ptr<NliBackend> make_nli_backend(const BackendDescriptor& descriptor);
std::shared_ptr<GenBackend> make_gen_backend(const BackendDescriptor& descriptor,
                                             const RuleTableConfig& rules = {});

}  // namespace zslt
