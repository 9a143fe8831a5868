// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Shared mock wiring and the hand-built correction fixture.

#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "zslt/gateway.hpp"
#include "zslt/mock_backends.hpp"
#include "zslt/pipeline.hpp"
#include "zslt/taxonomy.hpp"

namespace zslt::testing {

inline BackendDescriptor mock_descriptor(BackendKind kind) {
  BackendDescriptor d;
  d.kind = kind;
  d.endpoint = kind == BackendKind::kNli ? "mock:keyword" : "mock:rules";
  return d;
}

inline Gateways mock_gateways(const RuleTableConfig& rules = {},
                              std::shared_ptr<NliBackend> nli = std::make_shared<KeywordNliBackend>(),
                              std::shared_ptr<GenBackend> gen = nullptr) {
  if (!gen) gen = std::make_shared<RuleTableGenBackend>(rules);
  auto n = std::make_shared<NliGateway>(mock_descriptor(BackendKind::kNli), std::move(nli));
  auto g = std::make_shared<GenGateway>(mock_descriptor(BackendKind::kGenerate), std::move(gen));
  n->set_sleep_for_testing([](int) {});
  g->set_sleep_for_testing([](int) {});
  return {n, g};
}

inline LongTailDataset dataset_of(const std::vector<std::pair<std::string, std::string>>& text_label,
                                  std::vector<std::string> extra_labels = {}) {
  LongTailDataset ds;
  for (const auto& [text, label] : text_label) ds.samples.push_back({"", text, label});
  finalize(ds);
  for (auto& l : extra_labels) ds.label_space.push_back(std::move(l));
  std::sort(ds.label_space.begin(), ds.label_space.end());
  ds.label_space.erase(std::unique(ds.label_space.begin(), ds.label_space.end()), ds.label_space.end());
  return ds;
}

/// Seven trap samples where a three-word distractor shares two words with
/// the text (overlap 2/3, score 19/22) while the gold shares none (score
/// 1/2), so entailment alone ranks the distractor first. A rule keyed on a
/// word unique to each text emits the gold label; the final premise then
/// gives the gold overlap 1 (score 9/10) and flips the argmax. Three easy
/// samples carry their gold verbatim.
struct CorrectionFixture {
  LongTailDataset dataset;
  RuleTableConfig rules;
};

inline CorrectionFixture correction_fixture() {
  struct Trap {
    const char* gold;
    const char* distractor;
    const char* text;
    const char* keyword;
  };
  const std::vector<Trap> traps = {
      {"Genetics", "Cell Biology Methods", "cell biology notes on heredity", "heredity"},
      {"Immunology", "Vaccine Trial Design", "vaccine trial measuring antibodies", "antibodies"},
      {"Astronomy", "Telescope Optics Engineering", "telescope optics observing galaxies", "galaxies"},
      {"Oceanography", "Marine Sensor Networks", "marine sensor readings near coral reefs", "coral"},
      {"Linguistics", "Speech Signal Processing", "speech signal study of dialects", "dialects"},
      {"Cardiology", "Blood Pressure Monitoring", "blood pressure changes after arrhythmia", "arrhythmia"},
      {"Seismology", "Structural Damage Assessment", "structural damage from earthquakes", "earthquakes"},
  };
  std::vector<std::pair<std::string, std::string>> rows;
  std::vector<std::string> distractors;
  CorrectionFixture f;
  for (const auto& t : traps) {
    rows.emplace_back(t.text, t.gold);
    distractors.emplace_back(t.distractor);
    f.rules.rules.push_back({t.keyword, t.gold});
  }
  rows.emplace_back("machine learning for tabular data", "Machine Learning");
  rows.emplace_back("organic chemistry reaction yields", "Organic Chemistry");
  rows.emplace_back("number theory and prime gaps", "Number Theory");
  f.dataset = dataset_of(rows, distractors);
  f.rules.fallback = "general";
  return f;
}

}  // namespace zslt::testing
