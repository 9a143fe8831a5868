// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "generators.hpp"
#include "zslt/text.hpp"

namespace zslt::text {
namespace {

TEST(Text, NormalizeLabelCollapsesWhitespaceAndKeepsCase) {
  EXPECT_EQ(normalize_label("  Polymerase   chain\treaction "), "Polymerase chain reaction");
  EXPECT_EQ(normalize_label(""), "");
  EXPECT_EQ(fold_normalized(" Eau  de PARFUM"), "eau de parfum");
}

TEST(Text, FoldCaseLeavesNonAsciiBytes) { EXPECT_EQ(fold_case("Crème BRÛLÉE"), "crème brÛlÉe"); }

TEST(Text, ContentWordsDropStopwordsAndSingleLetters) {
  const auto w = content_words("This text is related to a Cell-Biology study, x 2 of RNA.");
  const std::set<std::string> expected = {"biology", "cell", "related", "rna", "study", "text"};
  EXPECT_EQ(w, expected);
}

TEST(Text, Utf8LengthCountsCodePoints) {
  EXPECT_EQ(utf8_length("abc"), 3u);
  EXPECT_EQ(utf8_length("café"), 4u);
  EXPECT_EQ(utf8_length("日本語"), 3u);
}

TEST(Text, TruncateHeadCutsAtWordBoundary) {
  auto t = truncate_head("alpha beta gamma", 12);
  EXPECT_TRUE(t.truncated);
  EXPECT_EQ(t.text, "alpha beta");

  t = truncate_head("alpha beta gamma", 11);
  EXPECT_EQ(t.text, "alpha beta");

  t = truncate_head("alpha beta gamma", 16);
  EXPECT_FALSE(t.truncated);
  EXPECT_EQ(t.text, "alpha beta gamma");

  t = truncate_head("abcdefghij", 4);
  EXPECT_EQ(t.text, "abcd");

  EXPECT_FALSE(truncate_head("anything at all", 0).truncated);
}

TEST(Text, TruncateHeadNeverSplitsCodePoints) {
  const std::string s = "ééééé ééééé";
  auto t = truncate_head(s, 8);
  EXPECT_EQ(t.text, "ééééé");
  t = truncate_head("ééééééééé", 3);
  EXPECT_EQ(t.text, "ééé");
}

TEST(Text, TruncationPropertyHeadPrefixWithinLimit) {
  testing::Gen g(11);
  std::vector<std::string> vocab = {"a", "bb", "ccc", "dddd", "é", "日本", "x y"};
  for (int i = 0; i < 500; ++i) {
    const auto s = g.sentence(vocab, 0, 40);
    const auto limit = g.size(1, 60);
    const auto t = truncate_head(s, limit);
    EXPECT_LE(utf8_length(t.text), limit);
    EXPECT_EQ(s.compare(0, t.text.size(), t.text), 0) << s;
    EXPECT_EQ(t.truncated, utf8_length(s) > limit);
  }
}

}  // namespace
}  // namespace zslt::text
