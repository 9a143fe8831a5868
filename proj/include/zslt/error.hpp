// Copyright (C) 2026 zslt contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace zslt {

enum class ErrorCode {
  kInvalidArgument,
  // taxonomy_refactor
  kEmptyInput,
  kMalformedRecord,
  kUnknownPath,
  kEmptyResult,
  // model_gateway
  kTransport,
  kTimeout,
  kBackendUnavailable,
  kBackendRejected,
  kProtocolError,
  kEmptyGeneration,
  // llm_retriever
  kPlaceholderMismatch,
  // composition_pipeline
  kInvalidConfig,
  kStageError,
  kBatchAborted,
  // evaluation
  kEmptyRun,
  kMissingK,
  kSchemaMismatch,
  // cli
  kValidation,
  kIo,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message),
        code_(code),
        detail_(message) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }
  // Message without the code prefix.
  [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace zslt
