// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Hierarchical taxonomy ingestion and the refactoring of hierarchical label
// paths into a flat leaf-node (long-tail) prediction task.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace zslt {

struct RawSample {
  std::string text;
  std::vector<std::string> label_path;
};

using NodeId = std::size_t;

struct TaxonomyNode {
  std::string name;
  std::vector<NodeId> children;  // insertion order
  std::size_t depth = 0;         // root is 0, top-level categories are 1
  std::optional<NodeId> parent;

  [[nodiscard]] bool is_leaf() const noexcept { return children.empty(); }
};

/// Rooted label tree stored as an arena. Node 0 is the unnamed root.
class Taxonomy {
 public:
  Taxonomy();

  static constexpr NodeId kRoot = 0;

  /// Inserts (or walks) the chain for `path`; returns the final node.
  NodeId insert(std::span<const std::string> path);

  [[nodiscard]] std::optional<NodeId> find(std::span<const std::string> path) const;
  [[nodiscard]] std::optional<NodeId> child(NodeId parent, std::string_view name) const;

  [[nodiscard]] const TaxonomyNode& node(NodeId id) const { return nodes_.at(id); }
  [[nodiscard]] const TaxonomyNode& root() const { return nodes_.front(); }

  /// Count excluding the synthetic root.
  [[nodiscard]] std::size_t node_count() const noexcept { return nodes_.size() - 1; }
  [[nodiscard]] std::size_t max_depth() const;
  [[nodiscard]] std::vector<NodeId> leaves() const;

  [[nodiscard]] std::vector<std::string> path_of(NodeId id) const;
  /// Root-to-leaf paths in depth-first, insertion order.
  [[nodiscard]] std::vector<std::vector<std::string>> leaf_paths() const;

 private:
  std::vector<TaxonomyNode> nodes_;
  std::vector<std::map<std::string, NodeId, std::less<>>> index_;
};

/// Builds the minimal tree containing every label path. Path elements are
/// normalized with text::normalize_label. Throws kEmptyInput when `records`
/// is empty and kMalformedRecord naming the record index for an empty path
/// or an element that is blank after trimming.
Taxonomy parse_taxonomy(std::span<const RawSample> records);

/// True when two taxonomies have the same children (by name, any order) at
/// every node.
bool isomorphic(const Taxonomy& a, const Taxonomy& b);

class DepthPolicy {
 public:
  enum class Kind { kFixed, kMax };

  static DepthPolicy fixed_depth(std::size_t depth);
  static DepthPolicy max_depth() { return DepthPolicy(Kind::kMax, 0); }

  /// Accepts "max_depth", "max", "fixed_depth:N" or "fixed:N".
  static DepthPolicy parse(std::string_view spec);

  [[nodiscard]] Kind kind() const noexcept { return kind_; }
  [[nodiscard]] std::size_t depth() const noexcept { return depth_; }
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const DepthPolicy&, const DepthPolicy&) = default;

 private:
  DepthPolicy(Kind kind, std::size_t depth) : kind_(kind), depth_(depth) {}
  Kind kind_;
  std::size_t depth_;
};

struct LabeledText {
  std::string id;
  std::string text;
  std::string label;

  friend bool operator==(const LabeledText&, const LabeledText&) = default;
};

struct Provenance {
  std::string source;
  DepthPolicy policy = DepthPolicy::max_depth();
  std::size_t dropped_short = 0;  // paths shorter than a fixed depth
  std::size_t input_samples = 0;
};

struct LongTailDataset {
  std::vector<LabeledText> samples;
  std::vector<std::string> label_space;  // sorted, unique
  Provenance provenance;

  [[nodiscard]] bool has_label(std::string_view label) const;
};

/// Projects every sample onto a single leaf label. Under fixed_depth(d) the
/// label is the element at depth d and shorter paths are dropped (and
/// counted); under max_depth it is the final element. Sample ids are the
/// zero-based position in the output.
LongTailDataset refactor_to_longtail(const Taxonomy& taxonomy, std::span<const RawSample> samples,
                                     DepthPolicy policy, std::string source = {});

/// Seeded uniform subsample of `n` samples without replacement, preserving
/// order. Ids are reassigned and the label space recomputed.
LongTailDataset subsample(const LongTailDataset& dataset, std::size_t n, std::uint64_t seed);

/// Rebuilds the label space from the samples and renumbers ids.
void finalize(LongTailDataset& dataset);

struct LabelCount {
  std::string label;
  std::size_t count = 0;

  friend bool operator==(const LabelCount&, const LabelCount&) = default;
};

struct DistributionSummary {
  std::map<std::string, std::size_t> counts;
  std::vector<LabelCount> head;  // count descending, ties by label
  std::vector<LabelCount> tail;  // count ascending, ties by label
  double imbalance_ratio = 1.0;  // max_count / min_count

  /// (label, count) rows sorted by count descending, ties by label.
  [[nodiscard]] std::vector<LabelCount> sorted_descending() const;
};

DistributionSummary class_distribution(const LongTailDataset& dataset, std::size_t m);

}  // namespace zslt
