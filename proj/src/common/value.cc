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

#include "dbnet/common/value.h"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

#include "dbnet/common/error.h"

namespace dbnet {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

[[noreturn]] void wrong_kind(const Value& v, ValueKind wanted) {
  fail(ErrorKind::TypeMismatch, "expected " + std::string(kind_name(wanted)) + ", got " +
                                    std::string(kind_name(v.kind())) + " (" + v.to_string() + ")");
}

}  // namespace

std::string_view kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Null: return "Null";
    case ValueKind::Int: return "Int";
    case ValueKind::Float: return "Float";
    case ValueKind::Text: return "Text";
    case ValueKind::Bool: return "Bool";
    case ValueKind::Timestamp: return "Timestamp";
  }
  return "?";
}

std::string_view dsl_kind_name(ValueKind kind) {
  switch (kind) {
    case ValueKind::Int: return "INT";
    case ValueKind::Float: return "FLOAT";
    case ValueKind::Text: return "TEXT";
    case ValueKind::Bool: return "BOOL";
    case ValueKind::Timestamp: return "TS";
    case ValueKind::Null: return "NULL";
  }
  return "?";
}

std::optional<ValueKind> parse_kind(std::string_view text) {
  if (iequals(text, "INT") || iequals(text, "INTEGER")) return ValueKind::Int;
  if (iequals(text, "FLOAT")) return ValueKind::Float;
  if (iequals(text, "TEXT")) return ValueKind::Text;
  if (iequals(text, "BOOL")) return ValueKind::Bool;
  if (iequals(text, "TS") || iequals(text, "TIMESTAMP")) return ValueKind::Timestamp;
  return std::nullopt;
}

int64_t Value::as_int() const {
  if (auto* p = std::get_if<int64_t>(&v_)) return *p;
  wrong_kind(*this, ValueKind::Int);
}

double Value::as_float() const {
  if (auto* p = std::get_if<double>(&v_)) return *p;
  if (auto* p = std::get_if<int64_t>(&v_)) return static_cast<double>(*p);
  wrong_kind(*this, ValueKind::Float);
}

const std::string& Value::as_text() const {
  if (auto* p = std::get_if<std::string>(&v_)) return *p;
  wrong_kind(*this, ValueKind::Text);
}

bool Value::as_bool() const {
  if (auto* p = std::get_if<bool>(&v_)) return *p;
  wrong_kind(*this, ValueKind::Bool);
}

Timestamp Value::as_timestamp() const {
  if (auto* p = std::get_if<Timestamp>(&v_)) return *p;
  wrong_kind(*this, ValueKind::Timestamp);
}

std::string format_float(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, end);
  if (out.find_first_of(".e") == std::string::npos) out += ".0";
  return out;
}

std::string Value::to_string() const {
  switch (kind()) {
    case ValueKind::Null: return "NULL";
    case ValueKind::Int: return std::to_string(std::get<int64_t>(v_));
    case ValueKind::Float: return format_float(std::get<double>(v_));
    case ValueKind::Text: return std::get<std::string>(v_);
    case ValueKind::Bool: return std::get<bool>(v_) ? "true" : "false";
    case ValueKind::Timestamp: return "ts:" + std::to_string(std::get<Timestamp>(v_).micros);
  }
  return {};
}

std::optional<std::strong_ordering> compare(const Value& a, const Value& b) {
  if (a.is_null() || b.is_null()) return std::nullopt;
  auto ka = a.kind();
  auto kb = b.kind();
  if (ka == ValueKind::Int && kb == ValueKind::Int) return a.as_int() <=> b.as_int();
  if (a.is_numeric() && b.is_numeric()) {
    double x = a.as_float();
    double y = b.as_float();
    if (x < y) return std::strong_ordering::less;
    if (x > y) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  auto micros = [](const Value& v) {
    return v.kind() == ValueKind::Timestamp ? v.as_timestamp().micros : v.as_int();
  };
  if ((ka == ValueKind::Timestamp && (kb == ValueKind::Timestamp || kb == ValueKind::Int)) ||
      (kb == ValueKind::Timestamp && ka == ValueKind::Int)) {
    return micros(a) <=> micros(b);
  }
  if (ka == ValueKind::Text && kb == ValueKind::Text) {
    int c = a.as_text().compare(b.as_text());
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
  if (ka == ValueKind::Bool && kb == ValueKind::Bool) {
    return static_cast<int>(a.as_bool()) <=> static_cast<int>(b.as_bool());
  }
  fail(ErrorKind::TypeMismatch, "cannot compare " + std::string(kind_name(ka)) + " with " +
                                    std::string(kind_name(kb)));
}

namespace {

// Int and Float share a rank so they order numerically. Timestamp gets its
// own even though compare() accepts Int micros; mixing the two would break
// transitivity (Float never compares with Timestamp).
int sort_rank(ValueKind k) {
  switch (k) {
    case ValueKind::Null: return 0;
    case ValueKind::Int:
    case ValueKind::Float: return 1;
    case ValueKind::Text: return 2;
    case ValueKind::Bool: return 3;
    case ValueKind::Timestamp: return 4;
  }
  return 5;
}

}  // namespace

bool total_less(const Value& a, const Value& b) {
  int ra = sort_rank(a.kind());
  int rb = sort_rank(b.kind());
  if (ra != rb || ra == 0) return ra < rb;
  return *compare(a, b) == std::strong_ordering::less;
}

bool total_less(const std::vector<Value>& a, const std::vector<Value>& b) {
  return std::lexicographical_compare(
      a.begin(), a.end(), b.begin(), b.end(),
      [](const Value& x, const Value& y) { return total_less(x, y); });
}

Value coerce_to(const Value& v, ValueKind kind) {
  if (v.is_null() || v.kind() == kind) return v;
  if (kind == ValueKind::Float && v.kind() == ValueKind::Int) return Value(v.as_float());
  if (kind == ValueKind::Timestamp && v.kind() == ValueKind::Int) return Value(Timestamp{v.as_int()});
  fail(ErrorKind::TypeMismatch, "cannot assign " + std::string(kind_name(v.kind())) + " value " +
                                    v.to_string() + " to " + std::string(kind_name(kind)));
}

}  // namespace dbnet
