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

#include "turbdip/common.hpp"

namespace turbdip {

/// Anisotropic total variation: sum of |vertical| + |horizontal| neighbor
/// differences over in-bounds pairs only. Constant or single-pixel images
/// give 0.
template <typename S>
double tv(const Array2D<S>& x) {
  double acc = 0.0;
  const int h = x.height(), w = x.width();
  for (int i = 0; i + 1 < h; ++i)
    for (int j = 0; j < w; ++j)
      acc += std::abs(static_cast<double>(x(i + 1, j)) - static_cast<double>(x(i, j)));
  for (int i = 0; i < h; ++i)
    for (int j = 0; j + 1 < w; ++j)
      acc += std::abs(static_cast<double>(x(i, j + 1)) - static_cast<double>(x(i, j)));
  return acc;
}

/// Accumulates scale * dTV/dx into grad. Subgradient at zero differences is 0.
template <typename S>
void add_tv_subgradient(const Array2D<S>& x, double scale, Array2D<S>& grad) {
  const int h = x.height(), w = x.width();
  auto sgn = [](double d) { return d > 0.0 ? 1.0 : (d < 0.0 ? -1.0 : 0.0); };
  for (int i = 0; i + 1 < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const double s = sgn(static_cast<double>(x(i + 1, j)) - static_cast<double>(x(i, j)));
      grad(i + 1, j) += static_cast<S>(scale * s);
      grad(i, j) -= static_cast<S>(scale * s);
    }
  }
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j + 1 < w; ++j) {
      const double s = sgn(static_cast<double>(x(i, j + 1)) - static_cast<double>(x(i, j)));
      grad(i, j + 1) += static_cast<S>(scale * s);
      grad(i, j) -= static_cast<S>(scale * s);
    }
  }
}

}  // namespace turbdip
