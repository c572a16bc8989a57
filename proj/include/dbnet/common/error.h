// Copyright 2026 The dbnet Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dbnet {

enum class ErrorKind {
  // store
  InvalidIdentifier,
  DuplicateSchema,
  UnknownSchema,
  DuplicateTable,
  UnknownTable,
  InvalidColumn,
  UnknownColumn,
  TypeMismatch,
  ConstraintViolation,
  MalformedQuery,
  // txn
  UnknownTxn,
  AlreadyClosed,
  NotInitialized,
  // policy
  ParseError,
  ResolutionError,
  DuplicateProcedure,
  UnknownProcedure,
  DuplicateTrigger,
  ArgMismatch,
  CascadeDepthExceeded,
  RuntimeError,
  // provenance
  UnknownLogId,
  BrokenChain,
  // telemetry
  MalformedSpan,
  UnknownNode,
  // proxy
  UnknownExternal,
  DeviceError,
  UnknownDevice,
  // api
  AccessDenied,
  UnknownUser,
  MalformedRequest,
  NotFound,
  Io,
  Internal,
};

std::string_view to_string(ErrorKind kind);
std::optional<ErrorKind> parse_error_kind(std::string_view name);

// Every failure surfaced by the library is an Error carrying a kind; the
// api layer maps kinds onto HTTP status codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string message, std::string detail = {})
      : std::runtime_error(std::move(message)), kind_(kind), detail_(std::move(detail)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

[[noreturn]] inline void fail(ErrorKind kind, std::string message, std::string detail = {}) {
  throw Error(kind, std::move(message), std::move(detail));
}

}  // namespace dbnet
