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

#include "dbnet/common/error.h"

namespace dbnet {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidIdentifier: return "InvalidIdentifier";
    case ErrorKind::DuplicateSchema: return "DuplicateSchema";
    case ErrorKind::UnknownSchema: return "UnknownSchema";
    case ErrorKind::DuplicateTable: return "DuplicateTable";
    case ErrorKind::UnknownTable: return "UnknownTable";
    case ErrorKind::InvalidColumn: return "InvalidColumn";
    case ErrorKind::UnknownColumn: return "UnknownColumn";
    case ErrorKind::TypeMismatch: return "TypeMismatch";
    case ErrorKind::ConstraintViolation: return "ConstraintViolation";
    case ErrorKind::MalformedQuery: return "MalformedQuery";
    case ErrorKind::UnknownTxn: return "UnknownTxn";
    case ErrorKind::AlreadyClosed: return "AlreadyClosed";
    case ErrorKind::NotInitialized: return "NotInitialized";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ResolutionError: return "ResolutionError";
    case ErrorKind::DuplicateProcedure: return "DuplicateProcedure";
    case ErrorKind::UnknownProcedure: return "UnknownProcedure";
    case ErrorKind::DuplicateTrigger: return "DuplicateTrigger";
    case ErrorKind::ArgMismatch: return "ArgMismatch";
    case ErrorKind::CascadeDepthExceeded: return "CascadeDepthExceeded";
    case ErrorKind::RuntimeError: return "RuntimeError";
    case ErrorKind::UnknownLogId: return "UnknownLogId";
    case ErrorKind::BrokenChain: return "BrokenChain";
    case ErrorKind::MalformedSpan: return "MalformedSpan";
    case ErrorKind::UnknownNode: return "UnknownNode";
    case ErrorKind::UnknownExternal: return "UnknownExternal";
    case ErrorKind::DeviceError: return "DeviceError";
    case ErrorKind::UnknownDevice: return "UnknownDevice";
    case ErrorKind::AccessDenied: return "AccessDenied";
    case ErrorKind::UnknownUser: return "UnknownUser";
    case ErrorKind::MalformedRequest: return "MalformedRequest";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::Io: return "Io";
    case ErrorKind::Internal: return "Internal";
  }
  return "Unknown";
}

std::optional<ErrorKind> parse_error_kind(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorKind::Internal); ++i) {
    auto k = static_cast<ErrorKind>(i);
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

}  // namespace dbnet
