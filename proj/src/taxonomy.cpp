// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/taxonomy.hpp"

#include <algorithm>
#include <charconv>
#include <random>
#include <set>

#include "zslt/error.hpp"
#include "zslt/text.hpp"

namespace zslt {

Taxonomy::Taxonomy() {
  nodes_.push_back(TaxonomyNode{});
  index_.emplace_back();
}

NodeId Taxonomy::insert(std::span<const std::string> path) {
  NodeId current = kRoot;
  for (const auto& name : path) {
    auto& idx = index_[current];
    auto it = idx.find(name);
    if (it != idx.end()) {
      current = it->second;
      continue;
    }
    const NodeId id = nodes_.size();
    TaxonomyNode node;
    node.name = name;
    node.depth = nodes_[current].depth + 1;
    node.parent = current;
    nodes_.push_back(std::move(node));
    index_.emplace_back();
    nodes_[current].children.push_back(id);
    index_[current].emplace(name, id);
    current = id;
  }
  return current;
}

std::optional<NodeId> Taxonomy::child(NodeId parent, std::string_view name) const {
  const auto& idx = index_.at(parent);
  auto it = idx.find(name);
  if (it == idx.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> Taxonomy::find(std::span<const std::string> path) const {
  NodeId current = kRoot;
  for (const auto& name : path) {
    auto next = child(current, name);
    if (!next) return std::nullopt;
    current = *next;
  }
  return current;
}

std::size_t Taxonomy::max_depth() const {
  std::size_t d = 0;
  for (const auto& n : nodes_) d = std::max(d, n.depth);
  return d;
}

std::vector<NodeId> Taxonomy::leaves() const {
  std::vector<NodeId> out;
  for (NodeId id = 1; id < nodes_.size(); ++id) {
    if (nodes_[id].is_leaf()) out.push_back(id);
  }
  return out;
}

std::vector<std::string> Taxonomy::path_of(NodeId id) const {
  std::vector<std::string> path;
  while (id != kRoot) {
    const auto& n = nodes_.at(id);
    path.push_back(n.name);
    id = *n.parent;
  }
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<std::vector<std::string>> Taxonomy::leaf_paths() const {
  std::vector<std::vector<std::string>> out;
  std::vector<NodeId> stack{kRoot};
  while (!stack.empty()) {
    const NodeId id = stack.back();
    stack.pop_back();
    const auto& n = nodes_[id];
    if (id != kRoot && n.is_leaf()) out.push_back(path_of(id));
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

Taxonomy parse_taxonomy(std::span<const RawSample> records) {
  if (records.empty()) throw Error(ErrorCode::kEmptyInput, "no records");
  Taxonomy taxonomy;
  std::vector<std::string> path;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rec = records[i];
    if (rec.label_path.empty()) {
      throw Error(ErrorCode::kMalformedRecord, "record " + std::to_string(i) + ": empty label path");
    }
    path.clear();
    for (std::size_t j = 0; j < rec.label_path.size(); ++j) {
      auto label = text::normalize_label(rec.label_path[j]);
      if (label.empty()) {
        throw Error(ErrorCode::kMalformedRecord, "record " + std::to_string(i) +
                                                     ": blank label at path position " +
                                                     std::to_string(j));
      }
      path.push_back(std::move(label));
    }
    taxonomy.insert(path);
  }
  return taxonomy;
}

namespace {

bool isomorphic_at(const Taxonomy& a, NodeId na, const Taxonomy& b, NodeId nb) {
  const auto& ca = a.node(na).children;
  const auto& cb = b.node(nb).children;
  if (ca.size() != cb.size()) return false;
  for (NodeId child : ca) {
    auto other = b.child(nb, a.node(child).name);
    if (!other || !isomorphic_at(a, child, b, *other)) return false;
  }
  return true;
}

std::vector<std::string> normalized_path(const RawSample& s, std::size_t index) {
  std::vector<std::string> path;
  path.reserve(s.label_path.size());
  for (const auto& e : s.label_path) {
    auto label = text::normalize_label(e);
    if (label.empty()) {
      throw Error(ErrorCode::kMalformedRecord,
                  "sample " + std::to_string(index) + ": blank label in path");
    }
    path.push_back(std::move(label));
  }
  if (path.empty()) {
    throw Error(ErrorCode::kMalformedRecord, "sample " + std::to_string(index) + ": empty label path");
  }
  return path;
}

}  // namespace

bool isomorphic(const Taxonomy& a, const Taxonomy& b) {
  return a.node_count() == b.node_count() && isomorphic_at(a, Taxonomy::kRoot, b, Taxonomy::kRoot);
}

DepthPolicy DepthPolicy::fixed_depth(std::size_t depth) {
  if (depth == 0) throw Error(ErrorCode::kInvalidArgument, "fixed depth must be >= 1");
  return DepthPolicy(Kind::kFixed, depth);
}

DepthPolicy DepthPolicy::parse(std::string_view spec) {
  if (spec == "max_depth" || spec == "max") return max_depth();
  for (std::string_view prefix : {std::string_view("fixed_depth:"), std::string_view("fixed:")}) {
    if (spec.starts_with(prefix)) {
      auto digits = spec.substr(prefix.size());
      std::size_t d = 0;
      auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
      if (ec == std::errc() && ptr == digits.data() + digits.size() && d > 0) return fixed_depth(d);
      break;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "bad depth policy '" + std::string(spec) +
                                               "' (expected max_depth or fixed_depth:N)");
}

std::string DepthPolicy::to_string() const {
  return kind_ == Kind::kMax ? std::string("max_depth") : "fixed_depth:" + std::to_string(depth_);
}

bool LongTailDataset::has_label(std::string_view label) const {
  return std::binary_search(label_space.begin(), label_space.end(), label);
}

void finalize(LongTailDataset& dataset) {
  std::set<std::string> labels;
  for (std::size_t i = 0; i < dataset.samples.size(); ++i) {
    dataset.samples[i].id = std::to_string(i);
    labels.insert(dataset.samples[i].label);
  }
  dataset.label_space.assign(labels.begin(), labels.end());
}

LongTailDataset refactor_to_longtail(const Taxonomy& taxonomy, std::span<const RawSample> samples,
                                     DepthPolicy policy, std::string source) {
  LongTailDataset out;
  out.provenance.source = std::move(source);
  out.provenance.policy = policy;
  out.provenance.input_samples = samples.size();

  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto path = normalized_path(samples[i], i);
    if (!taxonomy.find(path)) {
      std::string joined;
      for (const auto& p : path) joined += (joined.empty() ? "" : " > ") + p;
      throw Error(ErrorCode::kUnknownPath,
                  "sample " + std::to_string(i) + ": path '" + joined + "' not in taxonomy");
    }
    std::string label;
    if (policy.kind() == DepthPolicy::Kind::kFixed) {
      if (path.size() < policy.depth()) {
        ++out.provenance.dropped_short;
        continue;
      }
      label = std::move(path[policy.depth() - 1]);
    } else {
      label = std::move(path.back());
    }
    out.samples.push_back(LabeledText{{}, samples[i].text, std::move(label)});
  }

  if (out.samples.empty()) {
    throw Error(ErrorCode::kEmptyResult,
                "all " + std::to_string(samples.size()) + " samples dropped under " + policy.to_string());
  }
  finalize(out);
  return out;
}

LongTailDataset subsample(const LongTailDataset& dataset, std::size_t n, std::uint64_t seed) {
  if (n >= dataset.samples.size()) return dataset;
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "subsample size must be >= 1");
  LongTailDataset out;
  out.provenance = dataset.provenance;
  std::mt19937_64 rng(seed);
  std::sample(dataset.samples.begin(), dataset.samples.end(), std::back_inserter(out.samples), n, rng);
  finalize(out);
  return out;
}

std::vector<LabelCount> DistributionSummary::sorted_descending() const {
  std::vector<LabelCount> rows;
  rows.reserve(counts.size());
  for (const auto& [label, count] : counts) rows.push_back({label, count});
  std::stable_sort(rows.begin(), rows.end(),
                   [](const LabelCount& a, const LabelCount& b) { return a.count > b.count; });
  return rows;
}

DistributionSummary class_distribution(const LongTailDataset& dataset, std::size_t m) {
  if (m < 1 || m > dataset.label_space.size()) {
    throw Error(ErrorCode::kInvalidArgument, "m must be in [1, " +
                                                 std::to_string(dataset.label_space.size()) + "]");
  }
  DistributionSummary summary;
  for (const auto& s : dataset.samples) ++summary.counts[s.label];

  // counts is keyed by label, so stable sorts give lexicographic tie-breaks.
  auto desc = summary.sorted_descending();
  summary.head.assign(desc.begin(), desc.begin() + static_cast<std::ptrdiff_t>(m));

  std::vector<LabelCount> asc(desc.begin(), desc.end());
  std::sort(asc.begin(), asc.end(), [](const LabelCount& a, const LabelCount& b) {
    return a.count != b.count ? a.count < b.count : a.label < b.label;
  });
  summary.tail.assign(asc.begin(), asc.begin() + static_cast<std::ptrdiff_t>(m));

  summary.imbalance_ratio =
      static_cast<double>(desc.front().count) / static_cast<double>(asc.front().count);
  return summary;
}

}  // namespace zslt
