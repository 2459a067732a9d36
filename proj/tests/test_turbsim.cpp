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

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"
#include "turbdip/metrics.hpp"
#include "turbdip/turbsim.hpp"

using namespace turbdip;

namespace {

FrameSequence static_scene(int h, int w) {
  FrameSequence s;
  s.frames.push_back(Frame{test_util::make_scene(h, w), std::nullopt});
  return s;
}

}  // namespace

TEST_SUITE("turbsim") {

TEST_CASE("all-zero parameters are the identity") {
  TurbulenceParams p;
  p.tilt_strength = 0;
  p.blur_sigma = 0;
  p.noise_sigma = 0;
  const FrameSequence clean = static_scene(24, 24);
  const auto [dist, cl] = synthesize_sequence(clean, 5, p, 3);
  REQUIRE(dist.size() == 5);
  for (int t = 0; t < 5; ++t) CHECK(dist.frames[t].luma == clean.frames[0].luma);
}

TEST_CASE("zero strength gives a zero field") {
  TurbulenceParams p;
  p.tilt_strength = 0;
  const TiltField f = random_tilt_field(16, 16, p, nullptr, 9);
  for (size_t i = 0; i < f.dx.size(); ++i) {
    CHECK(f.dx.data()[i] == 0.0f);
    CHECK(f.dy.data()[i] == 0.0f);
  }
}

TEST_CASE("fields and sequences are seed-deterministic") {
  TurbulenceParams p;
  const TiltField a = random_tilt_field(16, 16, p, nullptr, 5);
  const TiltField b = random_tilt_field(16, 16, p, nullptr, 5);
  CHECK(a.dx == b.dx);
  CHECK(a.dy == b.dy);
  const TiltField c = random_tilt_field(16, 16, p, nullptr, 6);
  CHECK(a.dx != c.dx);

  const FrameSequence clean = static_scene(16, 16);
  const auto [d1, c1] = synthesize_sequence(clean, 4, p, 77);
  const auto [d2, c2] = synthesize_sequence(clean, 4, p, 77);
  for (int t = 0; t < 4; ++t) CHECK(d1.frames[t].luma == d2.frames[t].luma);
}

TEST_CASE("peak displacement equals the configured strength") {
  TurbulenceParams p;
  p.tilt_strength = 2.5;
  TiltField prev;
  for (int t = 0; t < 6; ++t) {
    const TiltField f = random_tilt_field(20, 20, p, t == 0 ? nullptr : &prev, 100 + t);
    double max_mag = 0.0;
    for (size_t i = 0; i < f.dx.size(); ++i)
      max_mag = std::max(max_mag, std::hypot(static_cast<double>(f.dx.data()[i]),
                                             static_cast<double>(f.dy.data()[i])));
    CHECK(max_mag == doctest::Approx(2.5).epsilon(1e-4));
    prev = f;
  }
}

TEST_CASE("zero temporal correlation decouples consecutive fields") {
  TurbulenceParams p;
  p.temporal_correlation = 0.0;
  p.tilt_smoothness = 2.0;
  TiltField prev = random_tilt_field(12, 12, p, nullptr, 0);
  // Sample correlation of one pixel's dx across 1000 consecutive pairs.
  double sxy = 0, sx = 0, sy = 0, sxx = 0, syy = 0;
  const int n = 1000;
  for (int t = 1; t <= n; ++t) {
    const TiltField cur = random_tilt_field(12, 12, p, &prev, t);
    const double x = prev.dx(6, 6), y = cur.dx(6, 6);
    sx += x;
    sy += y;
    sxx += x * x;
    syy += y * y;
    sxy += x * y;
    prev = cur;
  }
  const double cov = sxy / n - (sx / n) * (sy / n);
  const double corr = cov / std::sqrt((sxx / n - (sx / n) * (sx / n)) *
                                      (syy / n - (sy / n) * (sy / n)));
  CHECK(std::abs(corr) < 0.1);
}

TEST_CASE("uniform integer tilt shifts the interior exactly") {
  const int h = 12, w = 12;
  Frame clean{test_util::make_scene(h, w), std::nullopt};
  TiltField tilt{Array2D<float>(h, w, 1.0f), Array2D<float>(h, w, 0.0f)};  // dx=1, dy=0
  TurbulenceParams p;
  p.blur_sigma = 0;
  p.noise_sigma = 0;
  const Frame out = distort_frame(clean, tilt, p, 0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x + 1 < w; ++x) CHECK(out.luma(y, x) == clean.luma(y, x + 1));
    CHECK(out.luma(y, w - 1) == clean.luma(y, w - 1));  // edge column replicated
  }
}

TEST_CASE("constant images pass through warp and blur unchanged") {
  Frame clean{Array2D<float>(10, 10, 0.42f), std::nullopt};
  TurbulenceParams p;
  p.noise_sigma = 0;
  const TiltField tilt = random_tilt_field(10, 10, p, nullptr, 4);
  const Frame out = distort_frame(clean, tilt, p, 0);
  for (size_t i = 0; i < out.luma.size(); ++i)
    CHECK(out.luma.data()[i] == doctest::Approx(0.42f).epsilon(1e-6));
}

TEST_CASE("gaussian blur preserves total intensity") {
  Rng rng(9);
  Array2D<float> img(64, 64);
  for (size_t i = 0; i < img.size(); ++i) img.data()[i] = static_cast<float>(rng.uniform01());
  const Array2D<float> blurred = gaussian_blur(img, 1.2);
  double before = 0, after = 0;
  for (size_t i = 0; i < img.size(); ++i) {
    before += img.data()[i];
    after += blurred.data()[i];
  }
  CHECK(after / img.size() == doctest::Approx(before / img.size()).epsilon(1e-6));
}

TEST_CASE("warp keeps values inside [0,1] without noise") {
  TurbulenceParams p;
  p.noise_sigma = 0;
  const FrameSequence clean = static_scene(24, 24);
  const auto [dist, cl] = synthesize_sequence(clean, 6, p, 13);
  for (const Frame& f : dist.frames)
    for (size_t i = 0; i < f.luma.size(); ++i) {
      CHECK(f.luma.data()[i] >= 0.0f);
      CHECK(f.luma.data()[i] <= 1.0f);
    }
}

TEST_CASE("tilt lowers fidelity on a structured scene") {
  TurbulenceParams tilted;
  tilted.tilt_strength = 2.0;
  tilted.blur_sigma = 0.5;
  tilted.noise_sigma = 0.01;
  TurbulenceParams flat = tilted;
  flat.tilt_strength = 0.0;

  const FrameSequence clean = static_scene(32, 32);
  const auto [dist_tilted, c1] = synthesize_sequence(clean, 100, tilted, 11);
  const auto [dist_flat, c2] = synthesize_sequence(clean, 100, flat, 11);
  double p_tilted = 0, p_flat = 0;
  for (int t = 0; t < 100; ++t) {
    p_tilted += psnr(dist_tilted.frames[t], clean.frames[0]);
    p_flat += psnr(dist_flat.frames[t], clean.frames[0]);
  }
  CHECK(p_tilted < p_flat);
}

TEST_CASE("parameter validation") {
  TurbulenceParams p;
  p.tilt_strength = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TurbulenceParams{};
  p.temporal_correlation = 1.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = TurbulenceParams{};
  CHECK_THROWS_AS(synthesize_sequence(static_scene(8, 8), 0, p, 0), std::invalid_argument);
}

}  // TEST_SUITE
