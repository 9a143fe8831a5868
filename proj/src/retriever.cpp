// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/retriever.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "zslt/error.hpp"
#include "zslt/text.hpp"

namespace zslt {

std::string render_pattern(std::string_view pattern, const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(pattern.size());
  std::size_t i = 0;
  while (i < pattern.size()) {
    if (pattern[i] == '{') {
      const auto close = pattern.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(pattern.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(pattern[i++]);
  }
  return out;
}

std::size_t count_placeholder(std::string_view pattern, std::string_view name) {
  const std::string token = "{" + std::string(name) + "}";
  std::size_t n = 0;
  for (auto pos = pattern.find(token); pos != std::string_view::npos; pos = pattern.find(token, pos + 1)) {
    ++n;
  }
  return n;
}

void PromptTemplate::validate() const {
  if (count_placeholder(pattern, "X") != 1) {
    throw Error(ErrorCode::kPlaceholderMismatch, "template '" + name + "' must contain {X} exactly once");
  }
  if (count_placeholder(pattern, "LABELS") > 1) {
    throw Error(ErrorCode::kPlaceholderMismatch, "template '" + name + "' has more than one {LABELS}");
  }
}

PromptCatalog PromptCatalog::builtin() {
  PromptCatalog c;
  c.add({"wos_field_prefix", "What field is this passage related to? {X}", "wos"});
  c.add({"wos_area_prefix", "What area is this text related to? {X}", "wos"});
  c.add({"wos_area_suffix", "{X} What area is this text related to?", "wos"});
  c.add({"amazon_review_wrap", "Here is a review: {X} What product category is this review related to?",
         "amazon"});
  c.add({"amazon_text_suffix", "{X} What product category is this text related to?", "amazon"});
  return c;
}

PromptCatalog PromptCatalog::from_json(const std::string& document) {
  auto doc = nlohmann::json::parse(document, nullptr, false);
  if (doc.is_discarded() || !doc.is_object() || !doc.contains("templates") || !doc["templates"].is_array()) {
    throw Error(ErrorCode::kValidation, "prompt catalog must be an object with a 'templates' array");
  }
  PromptCatalog c;
  for (const auto& t : doc["templates"]) {
    if (!t.is_object() || !t.contains("name") || !t.contains("pattern") || !t["name"].is_string() ||
        !t["pattern"].is_string()) {
      throw Error(ErrorCode::kValidation, "catalog templates need string 'name' and 'pattern'");
    }
    c.add({t["name"].get<std::string>(), t["pattern"].get<std::string>(), t.value("domain_hint", "")});
  }
  return c;
}

PromptCatalog PromptCatalog::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void PromptCatalog::add(PromptTemplate tmpl) {
  tmpl.validate();
  if (contains(tmpl.name)) throw Error(ErrorCode::kValidation, "duplicate template name '" + tmpl.name + "'");
  templates_.push_back(std::move(tmpl));
}

bool PromptCatalog::contains(std::string_view name) const {
  for (const auto& t : templates_) {
    if (t.name == name) return true;
  }
  return false;
}

const PromptTemplate& PromptCatalog::get(std::string_view name) const {
  for (const auto& t : templates_) {
    if (t.name == name) return t;
  }
  throw Error(ErrorCode::kInvalidConfig, "no prompt template named '" + std::string(name) + "'");
}

std::string render_init_prompt(std::string_view text, const PromptTemplate& tmpl) {
  tmpl.validate();
  if (count_placeholder(tmpl.pattern, "LABELS") != 0) {
    throw Error(ErrorCode::kPlaceholderMismatch,
                "initialization template '" + tmpl.name + "' must not use {LABELS}");
  }
  return render_pattern(tmpl.pattern, {{"X", std::string(text)}});
}

PrimedFamily PrimedFamily::custom(std::string pattern) {
  if (count_placeholder(pattern, "X") != 1 || count_placeholder(pattern, "LABELS") != 1) {
    throw Error(ErrorCode::kPlaceholderMismatch,
                "primed pattern must contain {X} and {LABELS} exactly once: '" + pattern + "'");
  }
  return PrimedFamily(Kind::kCustom, std::move(pattern));
}

PrimedFamily PrimedFamily::parse(const std::string& spec) {
  if (spec == "wos") return wos();
  if (spec == "amazon") return amazon();
  return custom(spec);
}

std::string PrimedFamily::to_string() const {
  switch (kind_) {
    case Kind::kWos: return "wos";
    case Kind::kAmazon: return "amazon";
    case Kind::kCustom: break;
  }
  return pattern_;
}

std::string render_primed_prompt(std::string_view text, const std::vector<std::string>& labels,
                                 const PrimedFamily& family) {
  if (labels.empty() || labels.size() > 5) {
    throw Error(ErrorCode::kInvalidArgument, "primed prompts take 1 to 5 labels, got " +
                                                 std::to_string(labels.size()));
  }
  std::string joined;
  for (const auto& l : labels) {
    if (!joined.empty()) joined += ", ";
    joined += l;
  }
  return render_pattern(family.pattern(), {{"X", std::string(text)}, {"LABELS", joined}});
}

std::vector<std::string> retrieve(const GenGateway& gateway, const GenRequest& request) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& g : gateway.generate(request)) {
    auto t = text::trim(g);
    if (!t.empty() && seen.insert(t).second) out.push_back(std::move(t));
  }
  return out;
}

std::string_view grounding_method_name(GroundingMethod method) {
  switch (method) {
    case GroundingMethod::kExact: return "exact";
    case GroundingMethod::kNormalized: return "normalized";
    case GroundingMethod::kSubstring: return "substring";
    case GroundingMethod::kUngrounded: return "ungrounded";
  }
  return "ungrounded";
}

namespace {

bool word_byte(char c) {
  const auto u = static_cast<unsigned char>(c);
  return (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z') || u >= 0x80;
}

// `needle` occurs in `hay` with non-word characters (or the ends) on both sides.
bool contains_phrase(std::string_view hay, std::string_view needle) {
  if (needle.empty()) return false;
  for (auto pos = hay.find(needle); pos != std::string_view::npos; pos = hay.find(needle, pos + 1)) {
    const bool left = pos == 0 || !word_byte(hay[pos - 1]) || !word_byte(needle.front());
    const auto end = pos + needle.size();
    const bool right = end == hay.size() || !word_byte(hay[end]) || !word_byte(needle.back());
    if (left && right) return true;
  }
  return false;
}

}  // namespace

std::vector<GroundedGeneration> ground_labels(const std::vector<std::string>& generations,
                                              const std::vector<std::string>& label_space) {
  std::vector<std::string> folded;
  folded.reserve(label_space.size());
  for (const auto& l : label_space) folded.push_back(text::fold_normalized(l));

  std::vector<GroundedGeneration> out;
  out.reserve(generations.size());
  for (const auto& raw : generations) {
    GroundedGeneration g{raw, std::nullopt, GroundingMethod::kUngrounded};
    const auto norm = text::fold_normalized(raw);

    for (const auto& l : label_space) {
      if (raw == l) {
        g.grounded = l;
        g.method = GroundingMethod::kExact;
        break;
      }
    }
    if (!g.grounded && !norm.empty()) {
      for (std::size_t i = 0; i < label_space.size(); ++i) {
        if (norm == folded[i]) {
          g.grounded = label_space[i];
          g.method = GroundingMethod::kNormalized;
          break;
        }
      }
    }
    if (!g.grounded && !norm.empty()) {
      std::optional<std::size_t> hit;
      std::size_t hits = 0;
      for (std::size_t i = 0; i < label_space.size(); ++i) {
        if (contains_phrase(norm, folded[i])) {
          ++hits;
          hit = i;
        }
      }
      if (hits != 1) {
        hit.reset();
        hits = 0;
        for (std::size_t i = 0; i < label_space.size(); ++i) {
          if (contains_phrase(folded[i], norm)) {
            ++hits;
            hit = i;
          }
        }
      }
      if (hits == 1) {
        g.grounded = label_space[*hit];
        g.method = GroundingMethod::kSubstring;
      }
    }
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace zslt
