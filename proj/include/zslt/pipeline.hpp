// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Declarative chains of entailment (E) and generation (L) stages:
// E(X), L(X), E(L(X)), E(L(E(X))) with optional priming, and the iterated
// E(L(...E(X))) form.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "zslt/entailment.hpp"
#include "zslt/error.hpp"
#include "zslt/gateway.hpp"
#include "zslt/retriever.hpp"
#include "zslt/taxonomy.hpp"

namespace zslt {

inline constexpr std::string_view kFinalPremisePattern = "Here is some text that entails {LLM_OUT}: {X}.";

enum class StageKind { kEntail, kLlm };

/// What a stage hands to the next one.
enum class Carries { kTopKLabels, kRawGeneration };

struct Stage {
  StageKind kind = StageKind::kEntail;
  // E: catalog template used as the premise template when the stage does not
  // follow an L stage. L: initialization template overriding the config's.
  std::optional<std::string> template_ref;
  Carries carries = Carries::kTopKLabels;

  friend bool operator==(const Stage&, const Stage&) = default;
};

struct GenerationSettings {
  int n = 1;
  int max_new_tokens = 16;
  double temperature = 0.0;

  friend bool operator==(const GenerationSettings&, const GenerationSettings&) = default;
};

struct PipelineConfig {
  std::string name;
  std::vector<Stage> stages;
  int prime_k = 0;     // labels from E injected into L's prompt; 0 disables priming
  int iterations = 1;  // number of trailing L -> E cycles
  std::string init_template = "wos_area_prefix";
  PrimedFamily primed_family = PrimedFamily::wos();
  std::string final_premise_pattern = std::string(kFinalPremisePattern);
  GenerationSettings generation;

  /// Throws kInvalidConfig describing the first violated rule.
  void validate(const PromptCatalog& catalog) const;
  /// Stage list with the trailing L -> E pair repeated for each extra iteration.
  [[nodiscard]] std::vector<Stage> executed_stages() const;
  [[nodiscard]] bool ends_in_entail() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// llm_only, entail_only, llm_then_entail, entail_llm_entail, primed, primed_plus.
std::map<std::string, PipelineConfig> builtin_configs();

/// Switches the initialization template and primed family to a dataset
/// family ("wos" or "amazon").
PipelineConfig with_family(PipelineConfig config, const std::string& family);

nlohmann::json to_json(const PipelineConfig& config);
PipelineConfig pipeline_config_from_json(const nlohmann::json& doc);

struct StageTrace {
  std::size_t index = 0;
  StageKind kind = StageKind::kEntail;
  std::string prompt;  // premise (E) or prompt (L), exactly as sent
  bool truncated = false;
  std::vector<std::string> injected_labels;  // primed L stages
  std::vector<std::string> generations;      // L stages
  std::vector<GroundedGeneration> grounding;  // L stages
  std::vector<RankedLabel> ranking;           // E stages

  friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

struct PipelineResult {
  std::string input_id;
  std::optional<RankedPrediction> final_ranking;  // present iff the last stage is E
  std::vector<std::string> predictions;           // ordered labels, all in the label space
  std::vector<StageTrace> trace;
  std::optional<std::string> error;               // per-sample failure inside a batch

  [[nodiscard]] bool failed() const noexcept { return error.has_value(); }
  friend bool operator==(const PipelineResult&, const PipelineResult&) = default;
};

nlohmann::json to_json(const StageTrace& trace);

struct Gateways {
  std::shared_ptr<const NliGateway> nli;
  std::shared_ptr<const GenGateway> gen;
};

/// Per-call generation seed derived from the run seed, the sample id and
/// the stage index.
std::int64_t derive_seed(std::int64_t run_seed, std::string_view input_id, std::size_t stage_index);

/// Executes the stages in order for one sample. Failures are rethrown as
/// kStageError naming the stage. An L-only chain whose generations are all
/// Ungrounded yields an empty prediction list rather than an error.
PipelineResult run_pipeline(const PipelineConfig& config, std::string_view input_id, std::string_view text,
                            const std::vector<std::string>& label_space, const Gateways& gateways,
                            const PromptCatalog& catalog, std::optional<std::int64_t> seed = std::nullopt);

struct BatchOptions {
  int parallelism = 1;
  std::optional<std::int64_t> seed;
  std::size_t abort_window = 50;
  // Called in dataset order from whichever worker completes the prefix.
  std::function<void(const PipelineResult&)> on_result;
};

class BatchAborted : public Error {
 public:
  BatchAborted(const std::string& message, std::vector<PipelineResult> partial)
      : Error(ErrorCode::kBatchAborted, message), partial_(std::move(partial)) {}
  [[nodiscard]] const std::vector<PipelineResult>& partial() const noexcept { return partial_; }

 private:
  std::vector<PipelineResult> partial_;
};

/// One result per sample in dataset order. Sample failures are recorded on
/// the result. Throws kEmptyResult for an empty dataset and BatchAborted when
/// min(abort_window, size) consecutive samples fail.
std::vector<PipelineResult> run_batch(const PipelineConfig& config, const LongTailDataset& dataset,
                                      const Gateways& gateways, const PromptCatalog& catalog,
                                      const BatchOptions& options = {});

}  // namespace zslt
