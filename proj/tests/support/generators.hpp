// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Seeded random inputs for property tests.

#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "zslt/evaluation.hpp"
#include "zslt/taxonomy.hpp"

namespace zslt::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  std::size_t size(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
  }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

  template <typename T>
  const T& pick(const std::vector<T>& xs) {
    return xs[size(0, xs.size() - 1)];
  }

  std::string word(std::size_t min_len = 2, std::size_t max_len = 8) {
    static const std::string letters = "abcdefghijklmnopqrstuvwxyz";
    std::string w;
    const auto n = size(min_len, max_len);
    for (std::size_t i = 0; i < n; ++i) w += letters[size(0, letters.size() - 1)];
    return w;
  }

  std::string sentence(const std::vector<std::string>& vocab, std::size_t lo, std::size_t hi) {
    std::string s;
    const auto n = size(lo, hi);
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0) s += ' ';
      s += pick(vocab);
    }
    return s;
  }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Distinct class names "c00", "c01", ...
inline std::vector<std::string> class_names(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back("c" + std::string(i < 10 ? "0" : "") + std::to_string(i));
  }
  return out;
}

/// Random run: up to 500 records over up to 30 classes. Top-k lists have
/// 0..6 distinct labels and contain the gold about half of the time.
inline LabeledRun random_run(Gen& g, std::size_t max_records = 500, std::size_t max_classes = 30) {
  LabeledRun run;
  run.label_space = class_names(g.size(1, max_classes));
  const auto n = g.size(1, max_records);
  for (std::size_t i = 0; i < n; ++i) {
    RunRecord r;
    r.input_id = std::to_string(i);
    r.gold = g.pick(run.label_space);
    auto pool = run.label_space;
    std::shuffle(pool.begin(), pool.end(), g.engine());
    const auto len = std::min(pool.size(), g.size(0, 6));
    r.topk.assign(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(len));
    if (g.coin() && !r.topk.empty() && std::find(r.topk.begin(), r.topk.end(), r.gold) == r.topk.end()) {
      r.topk[g.size(0, r.topk.size() - 1)] = r.gold;
    }
    r.failed = r.topk.empty();
    run.records.push_back(std::move(r));
  }
  return run;
}

/// Samples whose label paths walk a random tree with the given branching
/// and depth. Path lengths vary between min_depth and depth.
inline std::vector<RawSample> random_records(Gen& g, std::size_t n, std::size_t depth, std::size_t branching,
                                             std::size_t min_depth = 1) {
  std::vector<RawSample> out;
  for (std::size_t i = 0; i < n; ++i) {
    RawSample s;
    s.text = "sample " + std::to_string(i) + " " + g.word();
    const auto len = g.size(min_depth, depth);
    std::string prefix;
    for (std::size_t d = 0; d < len; ++d) {
      prefix += (d == 0 ? "" : "/") + std::to_string(g.size(0, branching - 1));
      s.label_path.push_back("n" + prefix);
    }
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace zslt::testing
