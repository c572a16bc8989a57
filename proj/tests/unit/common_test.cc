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

#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "dbnet/common/box.h"
#include "dbnet/common/error.h"
#include "dbnet/common/value.h"
#include "support/fixtures.h"

using namespace dbnet;
using dbnet::testing::error_kind;

TEST_CASE("every error kind round-trips through its name") {
  for (int k = 0; k <= static_cast<int>(ErrorKind::Internal); ++k) {
    auto kind = static_cast<ErrorKind>(k);
    CHECK(parse_error_kind(to_string(kind)) == kind);
  }
  CHECK(!parse_error_kind("NoSuchKind").has_value());
  Error e(ErrorKind::UnknownNode, "gone", "node 7");
  CHECK(e.kind() == ErrorKind::UnknownNode);
  CHECK(std::string(e.what()) == "gone");
  CHECK(e.detail() == "node 7");
}

TEST_CASE("kind names parse in both spellings") {
  for (auto k : {ValueKind::Int, ValueKind::Float, ValueKind::Text, ValueKind::Bool, ValueKind::Timestamp}) {
    CHECK(parse_kind(kind_name(k)) == k);
    CHECK(parse_kind(dsl_kind_name(k)) == k);
  }
  CHECK(parse_kind("int") == ValueKind::Int);
  CHECK(parse_kind("ts") == ValueKind::Timestamp);
  CHECK(!parse_kind("decimal").has_value());
}

TEST_CASE("equality is kind-sensitive, comparison is numeric") {
  CHECK(Value(1) != Value(1.0));
  CHECK(compare(Value(1), Value(1.0)) == std::strong_ordering::equal);
  CHECK(compare(Value(2), Value(1.5)) == std::strong_ordering::greater);
  CHECK(compare(Value("a"), Value("b")) == std::strong_ordering::less);
  CHECK(compare(Value(false), Value(true)) == std::strong_ordering::less);
  CHECK(compare(Value(Timestamp{5}), Value(6)) == std::strong_ordering::less);
  CHECK(!compare(Value(), Value(1)).has_value());
  CHECK(!compare(Value(1), Value()).has_value());
  CHECK(error_kind([] { compare(Value("a"), Value(1)); }) == ErrorKind::TypeMismatch);
  CHECK(error_kind([] { compare(Value(true), Value(1)); }) == ErrorKind::TypeMismatch);
}

TEST_CASE("total order puts Null first and is a strict weak order") {
  std::vector<Value> vs = {Value(), Value(-3), Value(2.5), Value(7), Value("x"), Value("a"), Value(true),
                           Value(Timestamp{1})};
  for (const auto& a : vs) {
    CHECK(!total_less(a, a));
    for (const auto& b : vs) {
      CHECK(!(total_less(a, b) && total_less(b, a)));
      for (const auto& c : vs) {
        if (total_less(a, b) && total_less(b, c)) CHECK(total_less(a, c));
      }
    }
    if (!a.is_null()) CHECK(total_less(Value(), a));
  }
  CHECK(total_less(std::vector<Value>{Value(1), Value()}, std::vector<Value>{Value(1), Value(0)}));
}

TEST_CASE("accessors and coercion") {
  CHECK(Value(3).as_float() == 3.0);
  CHECK(error_kind([] { Value(3.0).as_int(); }) == ErrorKind::TypeMismatch);
  CHECK(error_kind([] { Value().as_text(); }) == ErrorKind::TypeMismatch);
  CHECK(coerce_to(Value(3), ValueKind::Float) == Value(3.0));
  CHECK(coerce_to(Value(9), ValueKind::Timestamp) == Value(Timestamp{9}));
  CHECK(coerce_to(Value(), ValueKind::Text).is_null());
  CHECK(error_kind([] { coerce_to(Value(1.5), ValueKind::Int); }) == ErrorKind::TypeMismatch);
  CHECK(error_kind([] { coerce_to(Value("1"), ValueKind::Int); }) == ErrorKind::TypeMismatch);
}

TEST_CASE("display text") {
  CHECK(Value().to_string() == "NULL");
  CHECK(Value(42).to_string() == "42");
  CHECK(Value(0.5).to_string() == "0.5");
  CHECK(Value("hi").to_string() == "hi");
  CHECK(Value(true).to_string() == "true");
  CHECK(Value(Timestamp{12}).to_string() == "ts:12");
}

TEST_CASE("formatted floats read back exactly") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> d(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    double v = i % 3 == 0 ? std::ldexp(d(rng), static_cast<int>(rng() % 200) - 100) : d(rng);
    std::string s = format_float(v);
    CHECK(std::stod(s) == v);
    CHECK(s.find_first_of(".eE") != std::string::npos);
  }
  CHECK(format_float(2.0) == "2.0");
}

TEST_CASE("box copies deeply") {
  Box<std::vector<int>> a(std::vector<int>{1, 2});
  Box<std::vector<int>> b = a;
  b->push_back(3);
  CHECK(a->size() == 2);
  CHECK(!(a == b));
  b->pop_back();
  CHECK(a == b);
}
