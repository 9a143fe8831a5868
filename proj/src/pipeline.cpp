// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <set>
#include <thread>

#include "zslt/text.hpp"

namespace zslt {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& config, const std::string& what) {
  throw Error(ErrorCode::kInvalidConfig, "pipeline '" + config + "': " + what);
}

std::string_view kind_name(StageKind k) { return k == StageKind::kEntail ? "entail" : "llm"; }

StageKind parse_kind(const std::string& s) {
  if (s == "entail" || s == "E") return StageKind::kEntail;
  if (s == "llm" || s == "L") return StageKind::kLlm;
  throw Error(ErrorCode::kInvalidConfig, "unknown stage kind '" + s + "'");
}

Stage entail(std::optional<std::string> tmpl = std::nullopt) {
  return Stage{StageKind::kEntail, std::move(tmpl), Carries::kTopKLabels};
}

Stage llm() { return Stage{StageKind::kLlm, std::nullopt, Carries::kRawGeneration}; }

}  // namespace

void PipelineConfig::validate(const PromptCatalog& catalog) const {
  if (name.empty()) invalid(name, "name must be non-empty");
  if (stages.empty()) invalid(name, "at least one stage is required");
  if (prime_k < 0 || prime_k > 5) invalid(name, "prime_k must be in [0, 5]");
  if (iterations < 1) invalid(name, "iterations must be >= 1");
  if (generation.n < 1 || generation.max_new_tokens < 1 || !(generation.temperature >= 0.0)) {
    invalid(name, "generation settings need n >= 1, max_new_tokens >= 1, temperature >= 0");
  }
  if (count_placeholder(final_premise_pattern, "X") != 1 ||
      count_placeholder(final_premise_pattern, "LLM_OUT") != 1) {
    throw Error(ErrorCode::kPlaceholderMismatch,
                "pipeline '" + name + "': final premise pattern needs {LLM_OUT} and {X} exactly once");
  }
  bool has_llm = false;
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    const auto idx = "stage " + std::to_string(i) + ": ";
    if (s.kind == StageKind::kEntail) {
      if (s.carries != Carries::kTopKLabels) invalid(name, idx + "entail stages carry top_k_labels");
      if (s.template_ref) {
        const auto& t = catalog.get(*s.template_ref);
        if (count_placeholder(t.pattern, "LABELS") != 0) {
          invalid(name, idx + "premise template must not use {LABELS}");
        }
      }
    } else {
      has_llm = true;
      if (s.carries != Carries::kRawGeneration) invalid(name, idx + "llm stages carry raw_generation");
      if (i > 0 && stages[i - 1].kind == StageKind::kLlm) invalid(name, idx + "llm stage cannot follow an llm stage");
      if (prime_k > 0 && (i == 0 || stages[i - 1].kind != StageKind::kEntail)) {
        invalid(name, idx + "an llm stage consuming top_k_labels must follow an entail stage");
      }
      const bool primed = prime_k > 0;
      if (!primed) {
        const auto& t = catalog.get(s.template_ref.value_or(init_template));
        if (count_placeholder(t.pattern, "LABELS") != 0) {
          invalid(name, idx + "initialization template must not use {LABELS}");
        }
      }
    }
  }
  if (has_llm && prime_k == 0 && !catalog.contains(init_template)) {
    invalid(name, "unknown init_template '" + init_template + "'");
  }
  if (iterations > 1) {
    const auto n = stages.size();
    if (n < 2 || stages[n - 2].kind != StageKind::kLlm || stages[n - 1].kind != StageKind::kEntail) {
      invalid(name, "iterations > 1 requires the stages to end with an llm -> entail cycle");
    }
  }
}

std::vector<Stage> PipelineConfig::executed_stages() const {
  std::vector<Stage> out = stages;
  for (int it = 1; it < iterations && stages.size() >= 2; ++it) {
    out.push_back(stages[stages.size() - 2]);
    out.push_back(stages.back());
  }
  return out;
}

bool PipelineConfig::ends_in_entail() const {
  return !stages.empty() && stages.back().kind == StageKind::kEntail;
}

std::map<std::string, PipelineConfig> builtin_configs() {
  std::map<std::string, PipelineConfig> out;
  auto put = [&](PipelineConfig c) { out.emplace(c.name, std::move(c)); };

  PipelineConfig llm_only;
  llm_only.name = "llm_only";
  llm_only.stages = {llm()};
  // Top-k for an open-vocabulary generator: k seeded samples, grounded.
  llm_only.generation = GenerationSettings{5, 16, 0.7};
  put(llm_only);

  PipelineConfig entail_only;
  entail_only.name = "entail_only";
  entail_only.stages = {entail()};
  put(entail_only);

  PipelineConfig llm_then_entail;
  llm_then_entail.name = "llm_then_entail";
  llm_then_entail.stages = {llm(), entail()};
  put(llm_then_entail);

  PipelineConfig cycle;
  cycle.name = "entail_llm_entail";
  cycle.stages = {entail(), llm(), entail()};
  put(cycle);

  PipelineConfig primed = cycle;
  primed.name = "primed";
  primed.prime_k = 1;
  put(primed);

  PipelineConfig primed_plus = cycle;
  primed_plus.name = "primed_plus";
  primed_plus.prime_k = 5;
  put(primed_plus);

  return out;
}

PipelineConfig with_family(PipelineConfig config, const std::string& family) {
  if (family == "wos") {
    config.init_template = "wos_area_prefix";
    config.primed_family = PrimedFamily::wos();
  } else if (family == "amazon") {
    config.init_template = "amazon_review_wrap";
    config.primed_family = PrimedFamily::amazon();
  } else {
    throw Error(ErrorCode::kInvalidConfig, "unknown dataset family '" + family + "' (wos|amazon)");
  }
  return config;
}

json to_json(const PipelineConfig& config) {
  json stages = json::array();
  for (const auto& s : config.stages) {
    json j = {{"kind", kind_name(s.kind)},
              {"carries", s.carries == Carries::kTopKLabels ? "top_k_labels" : "raw_generation"}};
    if (s.template_ref) j["template_ref"] = *s.template_ref;
    stages.push_back(std::move(j));
  }
  return {{"name", config.name},
          {"stages", std::move(stages)},
          {"prime_k", config.prime_k},
          {"iterations", config.iterations},
          {"init_template", config.init_template},
          {"primed_family", config.primed_family.to_string()},
          {"final_premise_pattern", config.final_premise_pattern},
          {"generation",
           {{"n", config.generation.n},
            {"max_new_tokens", config.generation.max_new_tokens},
            {"temperature", config.generation.temperature}}}};
}

PipelineConfig pipeline_config_from_json(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::kInvalidConfig, "inline pipeline must be an object");
  PipelineConfig c;
  try {
    c.name = doc.at("name").get<std::string>();
    for (const auto& s : doc.at("stages")) {
      Stage stage = parse_kind(s.at("kind").get<std::string>()) == StageKind::kEntail ? entail() : llm();
      if (s.contains("template_ref")) stage.template_ref = s["template_ref"].get<std::string>();
      if (s.contains("carries")) {
        const auto carries = s["carries"].get<std::string>();
        if (carries == "top_k_labels") {
          stage.carries = Carries::kTopKLabels;
        } else if (carries == "raw_generation") {
          stage.carries = Carries::kRawGeneration;
        } else {
          throw Error(ErrorCode::kInvalidConfig, "unknown carries '" + carries + "'");
        }
      }
      c.stages.push_back(std::move(stage));
    }
    c.prime_k = doc.value("prime_k", 0);
    c.iterations = doc.value("iterations", 1);
    c.init_template = doc.value("init_template", c.init_template);
    if (doc.contains("primed_family")) c.primed_family = PrimedFamily::parse(doc["primed_family"].get<std::string>());
    c.final_premise_pattern = doc.value("final_premise_pattern", c.final_premise_pattern);
    if (doc.contains("generation")) {
      const auto& g = doc["generation"];
      c.generation.n = g.value("n", c.generation.n);
      c.generation.max_new_tokens = g.value("max_new_tokens", c.generation.max_new_tokens);
      c.generation.temperature = g.value("temperature", c.generation.temperature);
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kInvalidConfig, std::string("inline pipeline: ") + e.what());
  }
  return c;
}

json to_json(const StageTrace& t) {
  json j = {{"index", t.index}, {"kind", kind_name(t.kind)}, {"prompt", t.prompt}, {"truncated", t.truncated}};
  if (t.kind == StageKind::kEntail) {
    json ranking = json::array();
    for (const auto& r : t.ranking) ranking.push_back({{"label", r.label}, {"score", r.score}});
    j["ranking"] = std::move(ranking);
  } else {
    if (!t.injected_labels.empty()) j["injected_labels"] = t.injected_labels;
    j["generations"] = t.generations;
    json grounding = json::array();
    for (const auto& g : t.grounding) {
      grounding.push_back({{"raw", g.raw},
                           {"grounded", g.grounded ? json(*g.grounded) : json(nullptr)},
                           {"method", grounding_method_name(g.method)}});
    }
    j["grounding"] = std::move(grounding);
  }
  return j;
}

std::int64_t derive_seed(std::int64_t run_seed, std::string_view input_id, std::size_t stage_index) {
  // FNV-1a over the id, mixed with splitmix64.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : input_id) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t z = h ^ (static_cast<std::uint64_t>(run_seed) * 0x9E3779B97F4A7C15ULL) ^ stage_index;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  z ^= z >> 31;
  // Keep it positive for JSON consumers that parse into signed 32/64 bits.
  return static_cast<std::int64_t>(z >> 33);
}

PipelineResult run_pipeline(const PipelineConfig& config, std::string_view input_id, std::string_view text,
                            const std::vector<std::string>& label_space, const Gateways& gateways,
                            const PromptCatalog& catalog, std::optional<std::int64_t> seed) {
  if (label_space.empty()) throw Error(ErrorCode::kInvalidArgument, "label space must be non-empty");
  const auto stages = config.executed_stages();

  PipelineResult result;
  result.input_id = std::string(input_id);
  std::optional<RankedPrediction> ranking;
  std::string first_generation;

  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& stage = stages[i];
    const bool after_llm = i > 0 && stages[i - 1].kind == StageKind::kLlm;
    StageTrace trace;
    trace.index = i;
    trace.kind = stage.kind;
    try {
      if (stage.kind == StageKind::kEntail) {
        if (!gateways.nli) throw Error(ErrorCode::kInvalidArgument, "no nli gateway configured");
        if (after_llm) {
          const auto premise =
              render_pattern(config.final_premise_pattern, {{"LLM_OUT", first_generation}, {"X", std::string(text)}});
          ranking = classify(*gateways.nli, input_id, premise, label_space);
        } else {
          std::optional<std::string> tmpl;
          if (stage.template_ref) tmpl = catalog.get(*stage.template_ref).pattern;
          ranking = classify(*gateways.nli, input_id, text, label_space, tmpl);
        }
        ranking->input_id = std::string(input_id);
        trace.prompt = ranking->premise_used;
        trace.truncated = ranking->premise_truncated;
        trace.ranking = ranking->ranking;
      } else {
        if (!gateways.gen) throw Error(ErrorCode::kInvalidArgument, "no generate gateway configured");
        const bool primed = config.prime_k > 0 && i > 0 && stages[i - 1].kind == StageKind::kEntail;
        if (primed) {
          const auto k = std::min<std::size_t>(static_cast<std::size_t>(config.prime_k), ranking->ranking.size());
          trace.injected_labels = top_k(*ranking, k);
          trace.prompt = render_primed_prompt(text, trace.injected_labels, config.primed_family);
        } else {
          trace.prompt = render_init_prompt(text, catalog.get(stage.template_ref.value_or(config.init_template)));
        }
        GenRequest req;
        req.prompt = trace.prompt;
        req.n = config.generation.n;
        req.max_new_tokens = config.generation.max_new_tokens;
        req.temperature = config.generation.temperature;
        if (seed) req.seed = derive_seed(*seed, input_id, i);
        trace.generations = retrieve(*gateways.gen, req);
        if (trace.generations.empty()) {
          throw Error(ErrorCode::kEmptyGeneration, "all generations were blank");
        }
        trace.grounding = ground_labels(trace.generations, label_space);
        first_generation = trace.generations.front();
      }
    } catch (const Error& e) {
      throw Error(ErrorCode::kStageError,
                  "stage " + std::to_string(i) + " (" + std::string(kind_name(stage.kind)) + "): " + e.what());
    }
    result.trace.push_back(std::move(trace));
  }

  if (stages.back().kind == StageKind::kEntail) {
    for (const auto& r : ranking->ranking) result.predictions.push_back(r.label);
    result.final_ranking = std::move(ranking);
  } else {
    std::set<std::string> seen;
    for (const auto& g : result.trace.back().grounding) {
      if (g.grounded && seen.insert(*g.grounded).second) result.predictions.push_back(*g.grounded);
    }
  }
  return result;
}

std::vector<PipelineResult> run_batch(const PipelineConfig& config, const LongTailDataset& dataset,
                                      const Gateways& gateways, const PromptCatalog& catalog,
                                      const BatchOptions& options) {
  if (options.parallelism < 1) throw Error(ErrorCode::kInvalidArgument, "parallelism must be >= 1");
  if (dataset.samples.empty()) throw Error(ErrorCode::kEmptyResult, "dataset has no samples");
  config.validate(catalog);

  const std::size_t n = dataset.samples.size();
  const std::size_t window = std::max<std::size_t>(1, std::min(options.abort_window, n));

  std::vector<std::optional<PipelineResult>> slots(n);
  std::vector<PipelineResult> emitted;
  emitted.reserve(n);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex emit_mu;
  std::size_t failure_streak = 0;

  auto worker = [&] {
    while (!abort.load()) {
      const std::size_t idx = next.fetch_add(1);
      if (idx >= n) break;
      const auto& sample = dataset.samples[idx];
      PipelineResult r;
      try {
        r = run_pipeline(config, sample.id, sample.text, dataset.label_space, gateways, catalog, options.seed);
      } catch (const std::exception& e) {
        r = PipelineResult{};
        r.input_id = sample.id;
        r.error = e.what();
      }

      std::lock_guard lock(emit_mu);
      slots[idx] = std::move(r);
      while (emitted.size() < n && slots[emitted.size()] && !abort.load()) {
        auto& ready = *slots[emitted.size()];
        failure_streak = ready.failed() ? failure_streak + 1 : 0;
        if (options.on_result) options.on_result(ready);
        emitted.push_back(std::move(ready));
        if (failure_streak >= window) abort.store(true);
      }
    }
  };

  const int threads = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(options.parallelism), n));
  {
    std::vector<std::jthread> pool;
    for (int t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }

  if (abort.load()) {
    throw BatchAborted("last " + std::to_string(window) + " samples failed; stopped after " +
                           std::to_string(emitted.size()) + " of " + std::to_string(n),
                       std::move(emitted));
  }
  return emitted;
}

}  // namespace zslt
