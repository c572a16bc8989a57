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

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dbnet {

// UTC microseconds since the Unix epoch.
struct Timestamp {
  int64_t micros = 0;
  auto operator<=>(const Timestamp&) const = default;
};

enum class ValueKind { Null, Int, Float, Text, Bool, Timestamp };

std::string_view kind_name(ValueKind kind);

// Accepts the DSL spellings (INT, FLOAT, TEXT, BOOL, TS) and the long names
// (Int, Float, Text, Bool, Timestamp), case-insensitively.
std::optional<ValueKind> parse_kind(std::string_view text);

// DSL spelling of a kind, as accepted by parse_kind.
std::string_view dsl_kind_name(ValueKind kind);

class Value {
 public:
  using Storage = std::variant<std::monostate, int64_t, double, std::string, bool, Timestamp>;

  Value() = default;
  Value(int v) : v_(static_cast<int64_t>(v)) {}  // NOLINT(google-explicit-constructor)
  Value(int64_t v) : v_(v) {}                     // NOLINT(google-explicit-constructor)
  Value(double v) : v_(v) {}                      // NOLINT(google-explicit-constructor)
  Value(bool v) : v_(v) {}                        // NOLINT(google-explicit-constructor)
  Value(const char* v) : v_(std::string(v)) {}    // NOLINT(google-explicit-constructor)
  Value(std::string v) : v_(std::move(v)) {}      // NOLINT(google-explicit-constructor)
  Value(Timestamp v) : v_(v) {}                   // NOLINT(google-explicit-constructor)

  static Value null() { return Value(); }

  ValueKind kind() const { return static_cast<ValueKind>(v_.index()); }
  bool is_null() const { return kind() == ValueKind::Null; }
  bool is_numeric() const { return kind() == ValueKind::Int || kind() == ValueKind::Float; }

  // Accessors throw TypeMismatch on the wrong kind. as_float() widens Int.
  int64_t as_int() const;
  double as_float() const;
  const std::string& as_text() const;
  bool as_bool() const;
  Timestamp as_timestamp() const;

  const Storage& storage() const { return v_; }

  // Display form: NULL, 42, 0.5, text (unquoted), true/false, ts:<micros>.
  std::string to_string() const;

  // Exact, kind-sensitive equality (Int 1 != Float 1.0). Use compare() for
  // SQL semantics.
  friend bool operator==(const Value&, const Value&) = default;

 private:
  Storage v_;
};

using Cells = std::map<std::string, Value>;

// SQL comparison. Returns nullopt when either side is Null (unknown). Int and
// Float compare numerically; Timestamp compares with Timestamp or Int micros.
// Throws TypeMismatch for incomparable kinds.
std::optional<std::strong_ordering> compare(const Value& a, const Value& b);

// Total order used for sorting group keys: Null, numbers, Text, Bool, then
// Timestamp; values of one rank order by compare().
bool total_less(const Value& a, const Value& b);
bool total_less(const std::vector<Value>& a, const std::vector<Value>& b);

// Assignment coercion into a column or variable of `kind`: Null passes,
// Int widens to Float, Int converts to Timestamp; anything else must match.
Value coerce_to(const Value& v, ValueKind kind);

// Round-trippable text for a double (always contains '.' or an exponent).
std::string format_float(double v);

}  // namespace dbnet
