// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "generators.hpp"
#include "zslt/entailment.hpp"
#include "zslt/error.hpp"

namespace zslt {
namespace {

TEST(Hypothesis, UsesTheFixedTemplate) {
  EXPECT_EQ(build_hypothesis("Polycythemia Vera"), "This text is related to Polycythemia Vera.");
  EXPECT_THROW(build_hypothesis(""), Error);
}

TEST(EntailScore, RenormalizesOverEntailAndContradict) {
  EXPECT_DOUBLE_EQ(entail_score(NliScore{"h", 0.6, 0.2, 0.2}), 0.75);
  EXPECT_DOUBLE_EQ(entail_score(NliScore{"h", 0.0, 1.0, 0.0}), 0.5);
  EXPECT_DOUBLE_EQ(entail_score(mock_nli_score("x", build_hypothesis("y"))), 0.5);
  EXPECT_DOUBLE_EQ(entail_score(mock_nli_score("cell biology", build_hypothesis("Cell Biology"))), 0.9);
}

TEST(RenderPremise, IdentityOrSingleSubstitution) {
  EXPECT_EQ(render_premise("abc", std::nullopt), "abc");
  EXPECT_EQ(render_premise("a {X} b", std::string("Review: {X}")), "Review: a {X} b");
}

TEST(Classify, RanksByScoreThenLabel) {
  const auto gw = testing::mock_gateways();
  const std::vector<std::string> labels = {"Bath", "Body", "Face", "Face Masks"};
  const auto pred = classify(*gw.nli, "7", "a clay face mask", labels);
  ASSERT_EQ(pred.ranking.size(), 4u);
  EXPECT_EQ(pred.ranking[0].label, "Face");
  EXPECT_DOUBLE_EQ(pred.ranking[0].score, 0.9);
  // "Face Masks" overlaps on one of two words: o = 1/2, score (1+4)/(2+4).
  EXPECT_EQ(pred.ranking[1].label, "Face Masks");
  EXPECT_DOUBLE_EQ(pred.ranking[1].score, 5.0 / 6.0);
  EXPECT_EQ(pred.ranking[2].label, "Bath");
  EXPECT_EQ(pred.ranking[3].label, "Body");
  EXPECT_EQ(pred.premise_used, "a clay face mask");
  EXPECT_EQ(top_k(pred, 2), (std::vector<std::string>{"Face", "Face Masks"}));
  EXPECT_THROW(top_k(pred, 0), Error);
  EXPECT_THROW(top_k(pred, 5), Error);
}

TEST(Classify, AppliesPremiseTemplate) {
  const auto gw = testing::mock_gateways();
  const auto pred = classify(*gw.nli, "1", "soap", {"Soaps"}, std::string("Here is a review: {X}"));
  EXPECT_EQ(pred.premise_used, "Here is a review: soap");
}

TEST(Classify, ErrorsNameTheSample) {
  const auto gw = testing::mock_gateways();
  EXPECT_THROW(classify(*gw.nli, "1", "text", {}), Error);
  try {
    classify(*gw.nli, "s42", "  ", {"A"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(e.detail().find("s42"), std::string::npos);
  }
  auto faulty = std::make_shared<FaultInjectingNliBackend>(std::make_shared<KeywordNliBackend>(), "boom",
                                                           ErrorCode::kBackendRejected);
  const auto broken = testing::mock_gateways({}, faulty);
  try {
    classify(*broken.nli, "s9", "boom", {"A"});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendRejected);
    EXPECT_EQ(e.detail().rfind("sample s9", 0), 0u);
  }
}

TEST(Classify, RankingIsAPermutationOfTheLabelSpace) {
  testing::Gen g(3);
  const auto gw = testing::mock_gateways();
  std::vector<std::string> vocab;
  for (int i = 0; i < 40; ++i) vocab.push_back(g.word(3, 6));
  for (int trial = 0; trial < 100; ++trial) {
    std::set<std::string> uniq;
    while (uniq.size() < g.size(1, 20)) uniq.insert(g.sentence(vocab, 1, 3));
    const std::vector<std::string> labels(uniq.begin(), uniq.end());
    const auto pred = classify(*gw.nli, "x", g.sentence(vocab, 1, 12), labels);
    std::vector<std::string> ranked;
    for (const auto& r : pred.ranking) ranked.push_back(r.label);
    std::sort(ranked.begin(), ranked.end());
    EXPECT_EQ(ranked, labels);
    for (std::size_t i = 1; i < pred.ranking.size(); ++i) {
      const auto& a = pred.ranking[i - 1];
      const auto& b = pred.ranking[i];
      EXPECT_TRUE(a.score > b.score || (a.score == b.score && a.label < b.label));
    }
  }
}

}  // namespace
}  // namespace zslt
