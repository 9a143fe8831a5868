// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "generators.hpp"
#include "zslt/error.hpp"
#include "zslt/taxonomy.hpp"

namespace zslt {
namespace {

std::vector<RawSample> small_records() {
  return {
      {"pcr text", {"Biochemistry", "Polymerase chain reaction"}},
      {"blot text", {"Biochemistry", "Northern blotting"}},
      {"sleep text", {"Medical", "Healthy Sleep"}},
      {"kidney text", {"Medical", "Kidney Health"}},
      {"pcr again", {"Biochemistry", "Polymerase chain reaction"}},
      {"short", {"Medical"}},
  };
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

TEST(Taxonomy, ParsesMinimalTree) {
  const auto recs = small_records();
  const auto tax = parse_taxonomy(recs);
  EXPECT_EQ(tax.node_count(), 6u);
  EXPECT_EQ(tax.max_depth(), 2u);
  EXPECT_EQ(tax.root().children.size(), 2u);
  const std::vector<std::string> path = {"Biochemistry", "Northern blotting"};
  const auto id = tax.find(path);
  ASSERT_TRUE(id);
  EXPECT_TRUE(tax.node(*id).is_leaf());
  EXPECT_EQ(tax.node(*id).depth, 2u);
  EXPECT_EQ(tax.path_of(*id), path);
  EXPECT_EQ(tax.leaves().size(), 4u);
}

TEST(Taxonomy, NormalizesPathElements) {
  std::vector<RawSample> recs = {{"a", {" Medical ", "Healthy   Sleep"}}, {"b", {"Medical", "Healthy Sleep"}}};
  const auto tax = parse_taxonomy(recs);
  EXPECT_EQ(tax.node_count(), 2u);
}

TEST(Taxonomy, RejectsEmptyAndMalformedInput) {
  EXPECT_EQ(code_of([] { parse_taxonomy({}); }), ErrorCode::kEmptyInput);
  std::vector<RawSample> empty_path = {{"ok", {"A"}}, {"bad", {}}};
  try {
    parse_taxonomy(empty_path);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMalformedRecord);
    EXPECT_NE(e.detail().find("record 1"), std::string::npos);
  }
  std::vector<RawSample> blank = {{"bad", {"A", "   "}}};
  EXPECT_EQ(code_of([&] { parse_taxonomy(blank); }), ErrorCode::kMalformedRecord);
}

TEST(Taxonomy, EveryPrefixIsANodeAndNothingElse) {
  testing::Gen g(2024);
  const auto recs = testing::random_records(g, 1000, 5, 4);
  const auto tax = parse_taxonomy(recs);

  std::set<std::vector<std::string>> prefixes;
  for (const auto& r : recs) {
    for (std::size_t len = 1; len <= r.label_path.size(); ++len) {
      std::vector<std::string> p(r.label_path.begin(), r.label_path.begin() + static_cast<std::ptrdiff_t>(len));
      prefixes.insert(p);
    }
  }
  EXPECT_EQ(tax.node_count(), prefixes.size());
  for (const auto& p : prefixes) {
    const auto id = tax.find(p);
    ASSERT_TRUE(id);
    EXPECT_EQ(tax.node(*id).depth, p.size());
  }
}

TEST(Taxonomy, ParsingIsOrderIndependentAndIdempotent) {
  testing::Gen g(7);
  auto recs = testing::random_records(g, 300, 4, 3);
  const auto a = parse_taxonomy(recs);
  std::shuffle(recs.begin(), recs.end(), g.engine());
  const auto b = parse_taxonomy(recs);
  EXPECT_TRUE(isomorphic(a, b));

  std::vector<RawSample> leaf_records;
  for (const auto& p : a.leaf_paths()) leaf_records.push_back({"x", p});
  EXPECT_TRUE(isomorphic(a, parse_taxonomy(leaf_records)));

  std::vector<RawSample> fewer(recs.begin(), recs.begin() + 10);
  EXPECT_FALSE(isomorphic(a, parse_taxonomy(fewer)));
}

TEST(DepthPolicy, ParsesSpellings) {
  EXPECT_EQ(DepthPolicy::parse("max_depth"), DepthPolicy::max_depth());
  EXPECT_EQ(DepthPolicy::parse("max"), DepthPolicy::max_depth());
  EXPECT_EQ(DepthPolicy::parse("fixed_depth:2"), DepthPolicy::fixed_depth(2));
  EXPECT_EQ(DepthPolicy::parse("fixed:3").depth(), 3u);
  EXPECT_EQ(DepthPolicy::parse(DepthPolicy::fixed_depth(4).to_string()), DepthPolicy::fixed_depth(4));
  EXPECT_THROW(DepthPolicy::parse("fixed:0"), Error);
  EXPECT_THROW(DepthPolicy::parse("deepest"), Error);
}

TEST(Refactor, MaxDepthUsesLeafOfEachPath) {
  const auto recs = small_records();
  const auto ds = refactor_to_longtail(parse_taxonomy(recs), recs, DepthPolicy::max_depth(), "toy");
  ASSERT_EQ(ds.samples.size(), recs.size());
  EXPECT_EQ(ds.samples[0].label, "Polymerase chain reaction");
  EXPECT_EQ(ds.samples[5].label, "Medical");
  EXPECT_EQ(ds.samples[3].id, "3");
  EXPECT_EQ(ds.provenance.source, "toy");
  const std::vector<std::string> labels = {"Healthy Sleep", "Kidney Health", "Medical", "Northern blotting",
                                           "Polymerase chain reaction"};
  EXPECT_EQ(ds.label_space, labels);
}

TEST(Refactor, FixedDepthDropsShortPaths) {
  const auto recs = small_records();
  const auto tax = parse_taxonomy(recs);
  const auto ds = refactor_to_longtail(tax, recs, DepthPolicy::fixed_depth(2));
  EXPECT_EQ(ds.samples.size(), 5u);
  EXPECT_EQ(ds.provenance.dropped_short, 1u);
  EXPECT_EQ(ds.label_space.size(), 4u);

  const auto top = refactor_to_longtail(tax, recs, DepthPolicy::fixed_depth(1));
  EXPECT_EQ(top.label_space, (std::vector<std::string>{"Biochemistry", "Medical"}));

  EXPECT_EQ(code_of([&] { refactor_to_longtail(tax, recs, DepthPolicy::fixed_depth(3)); }),
            ErrorCode::kEmptyResult);
}

TEST(Refactor, UnknownPathIsRejected) {
  const auto recs = small_records();
  const auto tax = parse_taxonomy(recs);
  std::vector<RawSample> other = {{"x", {"Physics", "Optics"}}};
  EXPECT_EQ(code_of([&] { refactor_to_longtail(tax, other, DepthPolicy::max_depth()); }), ErrorCode::kUnknownPath);
}

TEST(Refactor, SubsampleIsSeededAndOrderPreserving) {
  testing::Gen g(5);
  const auto recs = testing::random_records(g, 200, 3, 3);
  const auto ds = refactor_to_longtail(parse_taxonomy(recs), recs, DepthPolicy::max_depth());
  const auto a = subsample(ds, 50, 99);
  const auto b = subsample(ds, 50, 99);
  const auto c = subsample(ds, 50, 100);
  ASSERT_EQ(a.samples.size(), 50u);
  EXPECT_EQ(a.samples, b.samples);
  EXPECT_NE(a.samples, c.samples);

  // Texts carry their source index, so order preservation is checkable.
  std::size_t last = 0;
  for (const auto& s : a.samples) {
    const auto idx = std::stoul(s.text.substr(7));
    EXPECT_GE(idx, last);
    last = idx;
  }
  EXPECT_EQ(subsample(ds, 1000, 1).samples.size(), ds.samples.size());
}

TEST(Distribution, HeadTailAndImbalance) {
  // Counts shaped like a long-tailed topic corpus.
  const std::vector<std::pair<std::string, std::size_t>> counts = {
      {"Polymerase chain reaction", 95}, {"Northern blotting", 88}, {"Molecular biology", 66},
      {"Human Metabolism", 65},          {"Genetics", 62},          {"Stealth Technology", 2},
      {"Voltage law", 1},                {"Healthy Sleep", 1},      {"Kidney Health", 1},
      {"Polycythemia Vera", 1}};
  LongTailDataset ds;
  for (const auto& [label, n] : counts) {
    for (std::size_t i = 0; i < n; ++i) ds.samples.push_back({"", "t", label});
  }
  finalize(ds);
  const auto d = class_distribution(ds, 5);
  ASSERT_EQ(d.head.size(), 5u);
  EXPECT_EQ(d.head.front(), (LabelCount{"Polymerase chain reaction", 95}));
  EXPECT_EQ(d.head.back(), (LabelCount{"Genetics", 62}));
  const std::vector<std::string> tail = {"Healthy Sleep", "Kidney Health", "Polycythemia Vera", "Voltage law",
                                         "Stealth Technology"};
  for (std::size_t i = 0; i < 5; ++i) EXPECT_EQ(d.tail[i].label, tail[i]);
  EXPECT_DOUBLE_EQ(d.imbalance_ratio, 95.0);
  EXPECT_THROW(class_distribution(ds, 0), Error);
  EXPECT_THROW(class_distribution(ds, 11), Error);
}

}  // namespace
}  // namespace zslt
