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

#include <optional>
#include <string>
#include <vector>

#include "turbdip/image.hpp"

namespace turbdip {

struct MetricsReport {
  std::optional<double> background_var;
  int n_background_pixels = 0;
  std::optional<std::vector<double>> per_frame_psnr;
  std::optional<double> mean_psnr;
  std::optional<double> mean_ssim;
  std::optional<double> external_biqi;  // computed outside; carried for reporting only

  std::string to_text() const;
};

/// Temporal stability of masked static background. For every pixel location,
/// the values of the frames whose mask marks it background form a temporal
/// series; locations with at least two samples contribute the population
/// variance of their series (on the 0-255 value scale), and the result is
/// the mean over contributing locations. `n_pixels_out` reports how many
/// locations qualified.
double background_variance(const FrameSequence& seq, const MaskSequence& masks,
                           int* n_pixels_out = nullptr);

/// 10*log10(1/MSE) on [0,1] luma; identical frames give +infinity.
double psnr(const Frame& a, const Frame& b);

/// Structural similarity, 11x11 Gaussian window (sigma 1.5), k1=0.01,
/// k2=0.03, dynamic range 1. Mean over fully-covered window positions.
/// Requires min(h, w) >= 11.
double ssim(const Frame& a, const Frame& b);

}  // namespace turbdip
