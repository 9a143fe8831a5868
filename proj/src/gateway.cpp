// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#include "zslt/gateway.hpp"

#include <cmath>
#include <set>

#include "zslt/error.hpp"
#include "zslt/text.hpp"

namespace zslt {

ConcurrencyLimiter::ConcurrencyLimiter(int max_in_flight)
    : capacity_(max_in_flight), available_(max_in_flight) {
  if (max_in_flight < 1) throw Error(ErrorCode::kInvalidArgument, "max_concurrency must be >= 1");
}

void ConcurrencyLimiter::acquire() {
  std::unique_lock lock(mu_);
  cv_.wait(lock, [this] { return available_ > 0; });
  --available_;
}

void ConcurrencyLimiter::release() {
  {
    std::lock_guard lock(mu_);
    ++available_;
  }
  cv_.notify_one();
}

namespace {

RetryPolicy policy_for(const BackendDescriptor& d) {
  if (d.max_retries < 0) throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  return RetryPolicy{d.max_retries, d.backoff_ms, {}};
}

}  // namespace

void check_nli_response(const NliRequest& request, const std::vector<NliScore>& scores) {
  if (scores.size() != request.hypotheses.size()) {
    throw Error(ErrorCode::kProtocolError, "expected " + std::to_string(request.hypotheses.size()) +
                                               " scores, got " + std::to_string(scores.size()));
  }
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const auto& s = scores[i];
    if (s.hypothesis != request.hypotheses[i]) {
      throw Error(ErrorCode::kProtocolError, "score " + std::to_string(i) + " is for '" + s.hypothesis +
                                                 "', expected '" + request.hypotheses[i] + "'");
    }
    for (double p : {s.p_entail, s.p_neutral, s.p_contradict}) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw Error(ErrorCode::kProtocolError, "probability out of [0,1] for '" + s.hypothesis + "'");
      }
    }
    if (std::abs(s.p_entail + s.p_neutral + s.p_contradict - 1.0) > 1e-6) {
      throw Error(ErrorCode::kProtocolError, "probabilities for '" + s.hypothesis + "' do not sum to 1");
    }
  }
}

NliGateway::NliGateway(BackendDescriptor descriptor, std::shared_ptr<NliBackend> backend)
    : descriptor_(std::move(descriptor)),
      backend_(std::move(backend)),
      limiter_(std::make_shared<ConcurrencyLimiter>(descriptor_.max_concurrency)),
      retry_(policy_for(descriptor_)) {
  if (descriptor_.kind != BackendKind::kNli) {
    throw Error(ErrorCode::kInvalidArgument, "NliGateway needs an nli backend descriptor");
  }
  if (!backend_) throw Error(ErrorCode::kInvalidArgument, "null nli backend");
}

NliResult NliGateway::score_nli(const NliRequest& request) const {
  if (text::trim(request.premise).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "premise must be non-empty");
  }
  if (request.hypotheses.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "at least one hypothesis is required");
  }
  std::set<std::string> seen;
  for (const auto& h : request.hypotheses) {
    if (!seen.insert(text::normalize_label(h)).second) {
      throw Error(ErrorCode::kInvalidArgument, "duplicate hypothesis '" + h + "'");
    }
  }

  auto cut = text::truncate_head(request.premise, descriptor_.max_premise_chars);
  NliRequest sent{cut.text, request.hypotheses};

  auto scores = with_retries(retry_, [&] {
    ConcurrencyLimiter::Permit permit(*limiter_);
    return backend_->score(sent);
  });
  check_nli_response(sent, scores);
  return NliResult{std::move(scores), std::move(sent.premise), cut.truncated};
}

GenGateway::GenGateway(BackendDescriptor descriptor, std::shared_ptr<GenBackend> backend)
    : descriptor_(std::move(descriptor)),
      backend_(std::move(backend)),
      limiter_(std::make_shared<ConcurrencyLimiter>(descriptor_.max_concurrency)),
      retry_(policy_for(descriptor_)) {
  if (descriptor_.kind != BackendKind::kGenerate) {
    throw Error(ErrorCode::kInvalidArgument, "GenGateway needs a generate backend descriptor");
  }
  if (!backend_) throw Error(ErrorCode::kInvalidArgument, "null generate backend");
}

std::vector<std::string> GenGateway::generate(const GenRequest& request) const {
  if (request.n < 1) throw Error(ErrorCode::kInvalidArgument, "n must be >= 1");
  if (request.max_new_tokens < 1) throw Error(ErrorCode::kInvalidArgument, "max_new_tokens must be >= 1");
  if (!(request.temperature >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "temperature must be >= 0");

  auto raw = with_retries(retry_, [&] {
    ConcurrencyLimiter::Permit permit(*limiter_);
    return backend_->generate(request);
  });

  std::vector<std::string> out;
  std::set<std::string> seen;
  bool any_non_empty = false;
  for (auto& g : raw) {
    if (!g.empty()) any_non_empty = true;
    if (seen.insert(g).second) out.push_back(std::move(g));
  }
  if (!any_non_empty) throw Error(ErrorCode::kEmptyGeneration, "backend returned no non-empty output");
  if (out.size() > static_cast<std::size_t>(request.n)) out.resize(static_cast<std::size_t>(request.n));
  return out;
}

}  // namespace zslt
