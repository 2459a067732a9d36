// Copyright (c) 2026 The TurbDIP Authors. All Rights Reserved.
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

#include "doctest.h"
#include "turbdip/warmstart.hpp"

using namespace turbdip;

TEST_SUITE("warmstart") {

TEST_CASE("init source follows the history depth") {
  ParamHistory<double> h;
  CHECK(predict_init(h).kind == InitKind::FreshRandom);

  h.push(0, {0.5, -1.0});
  const auto one = predict_init(h);
  CHECK(one.kind == InitKind::Copy);
  CHECK(one.params == std::vector<double>{0.5, -1.0});

  h.push(1, {1.0, -2.0});
  const auto two = predict_init(h);
  CHECK(two.kind == InitKind::Predicted);
  CHECK(two.params == std::vector<double>{1.5, -3.0});  // 2*p1 - p0
}

TEST_CASE("constant history extrapolates to itself") {
  ParamHistory<double> h;
  h.push(0, {0.25, 0.75, -4.0});
  h.push(1, {0.25, 0.75, -4.0});
  const auto spec = predict_init(h);
  CHECK(spec.kind == InitKind::Predicted);
  CHECK(spec.params == std::vector<double>{0.25, 0.75, -4.0});
}

TEST_CASE("prediction satisfies the extrapolation identity") {
  Rng rng(8);
  ParamHistory<double> h;
  std::vector<double> p0(64), p1(64);
  for (auto& v : p0) v = rng.uniform(-2, 2);
  for (auto& v : p1) v = rng.uniform(-2, 2);
  h.push(3, p0);
  h.push(5, p1);
  const auto spec = predict_init(h);
  for (size_t i = 0; i < p0.size(); ++i)
    CHECK(spec.params[i] + p0[i] == doctest::Approx(2.0 * p1[i]).epsilon(1e-12));
}

TEST_CASE("history keeps the last two entries") {
  ParamHistory<double> h;
  h.push(0, {0.0});
  h.push(1, {1.0});
  h.push(2, {2.0});
  REQUIRE(h.entries.size() == 2);
  CHECK(h.entries[0].first == 1);
  CHECK(h.entries[1].first == 2);
}

TEST_CASE("push validation") {
  ParamHistory<double> h;
  h.push(1, {1.0, 2.0});
  CHECK_THROWS_AS(h.push(0, {3.0, 4.0}), std::invalid_argument);   // out of order
  CHECK_THROWS_AS(h.push(1, {3.0, 4.0}), std::invalid_argument);   // duplicate
  CHECK_THROWS_AS(h.push(2, {3.0}), std::invalid_argument);        // length change
}

}  // TEST_SUITE
