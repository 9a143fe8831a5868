// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

// Uniform access to the two model capabilities the classifier needs: NLI
// scoring and text generation. Backends are either in-process mocks or HTTP
// services speaking the /v1/nli and /v1/generate JSON protocol.

#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "zslt/error.hpp"

namespace zslt {

struct NliRequest {
  std::string premise;
  std::vector<std::string> hypotheses;
};

struct NliScore {
  std::string hypothesis;
  double p_entail = 0.0;
  double p_neutral = 0.0;
  double p_contradict = 0.0;

  friend bool operator==(const NliScore&, const NliScore&) = default;
};

struct GenRequest {
  std::string prompt;
  int n = 1;
  int max_new_tokens = 16;
  double temperature = 0.0;
  std::optional<std::int64_t> seed;
};

enum class BackendKind { kNli, kGenerate };

struct BackendDescriptor {
  BackendKind kind = BackendKind::kNli;
  std::string endpoint = "mock:keyword";  // http(s)://host:port or mock:<name>
  std::size_t max_premise_chars = 4000;   // 0 disables truncation
  int timeout_ms = 30000;
  int max_retries = 3;
  int backoff_ms = 100;  // first retry delay, doubled on each retry
  int max_concurrency = 4;

  [[nodiscard]] bool is_mock() const { return endpoint.rfind("mock:", 0) == 0; }
  [[nodiscard]] std::string mock_name() const { return is_mock() ? endpoint.substr(5) : std::string(); }
};

/// Transport errors are thrown as Error(kTransport) or Error(kTimeout) and
/// are retried by the gateway; anything else propagates immediately.
class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual std::vector<NliScore> score(const NliRequest& request) = 0;
};

class GenBackend {
 public:
  virtual ~GenBackend() = default;
  virtual std::vector<std::string> generate(const GenRequest& request) = 0;
};

/// Counting limiter bounding in-flight calls.
class ConcurrencyLimiter {
 public:
  explicit ConcurrencyLimiter(int max_in_flight);

  class Permit {
   public:
    explicit Permit(ConcurrencyLimiter& owner) : owner_(&owner) { owner_->acquire(); }
    Permit(const Permit&) = delete;
    Permit& operator=(const Permit&) = delete;
    ~Permit() { owner_->release(); }

   private:
    ConcurrencyLimiter* owner_;
  };

  [[nodiscard]] int capacity() const noexcept { return capacity_; }

 private:
  void acquire();
  void release();

  int capacity_;
  int available_;
  std::mutex mu_;
  std::condition_variable cv_;
};

struct RetryPolicy {
  int max_retries = 3;
  int backoff_ms = 100;
  // Injected so tests do not sleep.
  std::function<void(int /*delay_ms*/)> sleep;
};

/// Runs `call` with exponential backoff on transport errors. After the
/// retries are exhausted a trailing Timeout stays Timeout and any other
/// transport failure becomes BackendUnavailable.
template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& call) -> decltype(call());

struct NliResult {
  std::vector<NliScore> scores;
  std::string premise_sent;
  bool truncated = false;
};

class NliGateway {
 public:
  NliGateway(BackendDescriptor descriptor, std::shared_ptr<NliBackend> backend);

  /// One score per hypothesis in request order. The premise is truncated to
  /// max_premise_chars before dispatch.
  NliResult score_nli(const NliRequest& request) const;

  [[nodiscard]] const BackendDescriptor& descriptor() const noexcept { return descriptor_; }
  void set_sleep_for_testing(std::function<void(int)> sleep) { retry_.sleep = std::move(sleep); }

 private:
  BackendDescriptor descriptor_;
  std::shared_ptr<NliBackend> backend_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
  RetryPolicy retry_;
};

class GenGateway {
 public:
  GenGateway(BackendDescriptor descriptor, std::shared_ptr<GenBackend> backend);

  /// Backend order, duplicates removed, at most `n` entries. Throws
  /// kEmptyGeneration when nothing non-empty came back.
  std::vector<std::string> generate(const GenRequest& request) const;

  [[nodiscard]] const BackendDescriptor& descriptor() const noexcept { return descriptor_; }
  void set_sleep_for_testing(std::function<void(int)> sleep) { retry_.sleep = std::move(sleep); }

 private:
  BackendDescriptor descriptor_;
  std::shared_ptr<GenBackend> backend_;
  std::shared_ptr<ConcurrencyLimiter> limiter_;
  RetryPolicy retry_;
};

/// Validates an NLI response against its request: cardinality, order,
/// probability ranges and the sum-to-one constraint (1e-6).
void check_nli_response(const NliRequest& request, const std::vector<NliScore>& scores);

template <typename Fn>
auto with_retries(const RetryPolicy& policy, Fn&& call) -> decltype(call()) {
  int delay = policy.backoff_ms;
  for (int attempt = 0;; ++attempt) {
    try {
      return call();
    } catch (const Error& e) {
      const bool transport = e.code() == ErrorCode::kTransport || e.code() == ErrorCode::kTimeout;
      if (!transport) throw;
      if (attempt >= policy.max_retries) {
        const std::string what = e.detail() + " (after " + std::to_string(attempt + 1) + " attempts)";
        if (e.code() == ErrorCode::kTimeout) throw Error(ErrorCode::kTimeout, what);
        throw Error(ErrorCode::kBackendUnavailable, what);
      }
    }
    if (policy.sleep) {
      policy.sleep(delay);
    } else {
      std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    }
    delay *= 2;
  }
}

}  // namespace zslt
