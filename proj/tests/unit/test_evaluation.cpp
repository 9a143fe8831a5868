// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "generators.hpp"
#include "metric_oracle.hpp"
#include "zslt/error.hpp"
#include "zslt/evaluation.hpp"

namespace zslt {
namespace {

LabeledRun hand_run() {
  LabeledRun run;
  run.label_space = {"a", "b", "c"};
  run.records = {{"0", "a", {"a", "b"}, false},
                 {"1", "b", {"a", "b"}, false},
                 {"2", "a", {"b", "a"}, false},
                 {"3", "c", {}, true}};
  return run;
}

TEST(Metrics, HandComputedAccuracy) {
  const auto run = hand_run();
  EXPECT_DOUBLE_EQ(top_k_accuracy(run, 1), 25.0);
  EXPECT_DOUBLE_EQ(top_k_accuracy(run, 2), 75.0);
  EXPECT_DOUBLE_EQ(top_k_accuracy(run, 5), 75.0);
}

TEST(Metrics, HandComputedMacroF1) {
  const auto run = hand_run();
  // k=1 effective predictions a, a, b, none: F1(a)=1/2, F1(b)=0, F1(c)=0.
  EXPECT_DOUBLE_EQ(macro_f1_at_k(run, 1), 100.0 * 0.5 / 3.0);
  // k=3 effective predictions a, b, a, none: F1(a)=1, F1(b)=1, F1(c)=0.
  EXPECT_DOUBLE_EQ(macro_f1_at_k(run, 3), 100.0 * 2.0 / 3.0);
  EXPECT_EQ(format2(macro_f1_at_k(run, 3)), "66.67");
}

TEST(Metrics, PerfectAndHalfRuns) {
  LabeledRun run;
  run.label_space = {"x", "y"};
  run.records = {{"0", "x", {"x"}, false}, {"1", "y", {"y"}, false}};
  EXPECT_DOUBLE_EQ(top_k_accuracy(run, 1), 100.0);
  EXPECT_DOUBLE_EQ(macro_f1_at_k(run, 1), 100.0);
  run.records[1].topk = {"x"};
  EXPECT_DOUBLE_EQ(top_k_accuracy(run, 1), 50.0);
  // x: tp 1, fp 1 -> 2/3; y: fn 1 -> 0.
  EXPECT_DOUBLE_EQ(macro_f1_at_k(run, 1), 100.0 * (2.0 / 3.0) / 2.0);
}

TEST(Metrics, ErrorsOnEmptyRunOrZeroK) {
  LabeledRun run;
  EXPECT_THROW(top_k_accuracy(run, 1), Error);
  EXPECT_THROW(macro_f1_at_k(run, 1), Error);
  EXPECT_THROW(top_k_accuracy(hand_run(), 0), Error);
}

TEST(Metrics, MatchBruteForceOracle) {
  testing::Gen g(99);
  for (int trial = 0; trial < 50; ++trial) {
    const auto run = testing::random_run(g, 120, 12);
    for (std::size_t k : {1u, 2u, 3u, 5u, 10u}) {
      EXPECT_EQ(top_k_accuracy(run, k), testing::oracle_top_k_accuracy(run, k));
      EXPECT_EQ(macro_f1_at_k(run, k), testing::oracle_macro_f1(run, k));
    }
  }
}

TEST(Metrics, AccuracyIsMonotoneInK) {
  testing::Gen g(5);
  for (int trial = 0; trial < 50; ++trial) {
    const auto run = testing::random_run(g, 80, 10);
    EXPECT_LE(top_k_accuracy(run, 1), top_k_accuracy(run, 3));
    EXPECT_LE(top_k_accuracy(run, 3), top_k_accuracy(run, 5));
  }
}

TEST(Aggregate, MeansOverOneThreeFive) {
  // Baseline topic-corpus accuracy row and generator-only macro F1 row.
  const auto acc = aggregate({{1, {48.10, 0}}, {3, {64.73, 0}}, {5, {70.46, 0}}});
  EXPECT_NEAR(acc.accuracy, 61.09, 0.01);
  const auto f1 = aggregate({{1, {0, 5.66}}, {3, {0, 12.25}}, {5, {0, 15.23}}});
  EXPECT_NEAR(f1.macro_f1, 11.04, 0.01);
  EXPECT_THROW(aggregate({{1, {}}, {3, {}}}), Error);
}

TEST(Evaluate, BuildsPerKAndAverages) {
  const auto r = evaluate(hand_run());
  EXPECT_EQ(r.n_samples, 4u);
  EXPECT_EQ(r.n_failed, 1u);
  ASSERT_TRUE(r.averages);
  EXPECT_DOUBLE_EQ(r.averages->accuracy, (25.0 + 75.0 + 75.0) / 3.0);
  EXPECT_FALSE(evaluate(hand_run(), {1, 3}).averages);
  const auto back = metrics_report_from_json(to_json(r));
  EXPECT_EQ(back.per_k, r.per_k);
  EXPECT_EQ(back.averages, r.averages);
  EXPECT_THROW(metrics_report_from_json(nlohmann::json::object()), Error);
}

TEST(Rounding, HalfAwayFromZero) {
  EXPECT_EQ(format2(61.0966), "61.10");
  EXPECT_EQ(format2(2.0 / 3.0 * 100.0), "66.67");
  EXPECT_EQ(format2(0.0), "0.00");
  EXPECT_DOUBLE_EQ(round2(1.005 * 1000.0), 1005.0);
}

TEST(Reference, ParsesAndComparesWithTolerance) {
  std::istringstream in(
      "# comment\n"
      "dataset\tconfig\tk\taccuracy\tmacro_f1\n"
      "amz\tentail_only\t1\t34.40\t25.10\n"
      "amz\tentail_only\tavg\t60.80\t51.15\n");
  const auto ref = ReferenceTable::parse(in);
  EXPECT_EQ(ref.rows().size(), 2u);
  EXPECT_EQ(ref.datasets(), (std::vector<std::string>{"amz"}));

  MetricsReport report;
  report.dataset = "amz";
  report.config = "entail_only";
  report.per_k[1] = {34.40, 25.10};
  report.averages = KMetrics{60.80, 51.20};
  auto diff = compare_to_reference(report, ref, 0.05);
  ASSERT_EQ(diff.size(), 4u);
  EXPECT_TRUE(diff[0].within_tolerance);
  EXPECT_TRUE(diff[2].within_tolerance);
  EXPECT_EQ(diff[3].metric, "macro_f1");
  EXPECT_NEAR(diff[3].delta, 0.05, 1e-9);
  EXPECT_TRUE(diff[3].within_tolerance);  // exactly on the boundary

  report.averages->macro_f1 = 51.21;
  diff = compare_to_reference(report, ref, 0.05);
  EXPECT_FALSE(diff[3].within_tolerance);

  std::ostringstream out;
  write_diff_tsv(out, diff);
  EXPECT_NE(out.str().find("avg\tmacro_f1\t51.21\t51.15\t+0.0600\tFLAG"), std::string::npos) << out.str();
}

TEST(Reference, RejectsBadRows) {
  std::istringstream short_row("a\tb\t1\t2\n");
  EXPECT_THROW(ReferenceTable::parse(short_row), Error);
  std::istringstream bad_k("a\tb\t2\t1\t1\n");
  EXPECT_THROW(ReferenceTable::parse(bad_k), Error);
  std::istringstream dup("a\tb\t1\t1\t1\na\tb\t1\t2\t2\n");
  EXPECT_THROW(ReferenceTable::parse(dup), Error);
}

TEST(Reference, ShippedTableCoversEveryCell) {
  const auto ref = ReferenceTable::load(std::string(ZSLT_DATA_DIR) + "/reference/published.tsv");
  EXPECT_EQ(ref.rows().size(), 3u * 6u * 4u);
  for (const auto& d : ref.datasets()) {
    EXPECT_EQ(ref.configs(d).size(), 6u);
    for (const auto& c : ref.configs(d)) {
      for (const char* k : {"1", "3", "5", "avg"}) EXPECT_TRUE(ref.find(d, c, k)) << d << c << k;
    }
  }
}

TEST(RunFiles, ReadsRecordsAndChecksSchema) {
  std::istringstream in(
      R"({"input_id": "0", "gold": "a", "topk": ["a", "b"], "config": "entail_only"}
{"input_id": "1", "gold": "b", "topk": [], "config": "entail_only", "error": "StageError: x"}
)");
  const auto file = read_run_records(in);
  EXPECT_EQ(file.config, "entail_only");
  EXPECT_EQ(file.run.records.size(), 2u);
  EXPECT_TRUE(file.run.records[1].failed);
  EXPECT_EQ(file.run.label_space, (std::vector<std::string>{"a", "b"}));

  std::istringstream mixed(R"({"input_id": "0", "gold": "a", "topk": [], "config": "x"}
{"input_id": "1", "gold": "a", "topk": [], "config": "y"})");
  EXPECT_THROW(read_run_records(mixed), Error);

  std::istringstream outside(R"({"input_id": "0", "gold": "z", "topk": []})");
  EXPECT_THROW(read_run_records(outside, {"a", "b"}), Error);

  std::istringstream dup(R"({"input_id": "0", "gold": "a", "topk": ["a", "a"]})");
  EXPECT_THROW(read_run_records(dup), Error);

  std::istringstream empty("");
  EXPECT_THROW(read_run_records(empty), Error);
}

TEST(ReportText, AlignsColumns) {
  std::ostringstream out;
  write_report_tsv(out, {evaluate(hand_run())});
  EXPECT_EQ(out.str(),
            "dataset\tconfig\tn\tfailed\ttop1_acc\ttop1_f1\ttop3_acc\ttop3_f1\ttop5_acc\ttop5_f1\tavg_acc\tavg_f1\n"
            "\t\t4\t1\t25.00\t16.67\t75.00\t66.67\t75.00\t66.67\t58.33\t50.00\n");
}

}  // namespace
}  // namespace zslt
