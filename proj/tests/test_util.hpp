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

#pragma once

#include <unistd.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>

#include "turbdip/common.hpp"

namespace test_util {

/// Deterministic structured scene: smooth gradient, two rectangles, a disc
/// and a sinusoidal texture band. Edges and flats for restoration tests.
inline turbdip::Array2D<float> make_scene(int h, int w) {
  turbdip::Array2D<float> img(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      float v = 0.25f + 0.35f * static_cast<float>(x) / w + 0.15f * static_cast<float>(y) / h;
      if (y > h / 8 && y < h / 3 && x > w / 6 && x < w / 2) v = 0.85f;
      if (y > h / 2 && y < 3 * h / 4 && x > w / 2 && x < 5 * w / 6) v = 0.1f;
      const float dy = y - 0.7f * h, dx = x - 0.25f * w;
      if (dy * dy + dx * dx < 0.01f * h * w) v = 0.65f;
      if (y >= 3 * h / 4)
        v += 0.12f * std::sin(x * 6.28318f * 4.0f / w);
      img(y, x) = std::clamp(v, 0.0f, 1.0f);
    }
  }
  return img;
}

template <typename S>
double plane_psnr(const turbdip::Array2D<S>& a, const turbdip::Array2D<S>& b) {
  double se = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a.data()[i]) - b.data()[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(a.size());
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

struct TempDir {
  std::filesystem::path path;

  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path = std::filesystem::temp_directory_path() /
           ("turbdip_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
            std::to_string(counter++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str() const { return path.string(); }
  std::string sub(const std::string& name) const { return (path / name).string(); }
};

}  // namespace test_util
