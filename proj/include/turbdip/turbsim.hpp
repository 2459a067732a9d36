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

#include <utility>

#include "turbdip/image.hpp"

// Synthetic turbulence: smooth random per-frame warp fields (temporally
// AR(1)-correlated), optional blur and additive noise. Gives aligned
// distorted/clean pairs for ground-truth evaluation.

namespace turbdip {

struct TurbulenceParams {
  double tilt_strength = 2.0;        // max warp magnitude, pixels
  double tilt_smoothness = 4.0;      // Gaussian sigma applied to the random fields
  double blur_sigma = 0.7;           // PSF width; 0 skips the blur
  double noise_sigma = 0.02;         // additive Gaussian noise on [0,1] values
  double temporal_correlation = 0.5; // AR(1) coefficient in [0,1)

  void validate() const;
};

struct TiltField {
  Array2D<float> dx, dy;  // displacement in pixels, sampled at each output pixel
};

/// Smoothed white Gaussian displacement field rescaled so its largest
/// displacement magnitude equals tilt_strength. With a previous field the
/// AR(1) blend c*prev + sqrt(1-c^2)*new is formed first and then rescaled,
/// so the magnitude bound holds for every frame.
TiltField random_tilt_field(int height, int width, const TurbulenceParams& params,
                            const TiltField* prev, uint64_t seed);

/// Bilinear backward warp by the tilt field (edge-clamped), Gaussian blur,
/// additive noise, clamp to [0,1]. Chroma planes are untouched.
Frame distort_frame(const Frame& clean, const TiltField& tilt, const TurbulenceParams& params,
                    uint64_t noise_seed);

/// Replicates a static clean frame (or walks a clean sequence) through
/// per-frame correlated tilt fields. Returns {distorted, clean} aligned
/// frame-for-frame.
std::pair<FrameSequence, FrameSequence> synthesize_sequence(const FrameSequence& clean,
                                                            int n_frames,
                                                            const TurbulenceParams& params,
                                                            uint64_t seed);

/// Separable Gaussian blur with mirrored (edge-inclusive) boundaries;
/// preserves constants exactly and total intensity up to rounding.
Array2D<float> gaussian_blur(const Array2D<float>& img, double sigma);

}  // namespace turbdip
