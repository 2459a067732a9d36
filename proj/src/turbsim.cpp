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

#include "turbdip/turbsim.hpp"

#include <algorithm>
#include <cmath>

namespace turbdip {
namespace {

// Mirrors index into [0, n) with edge repetition (period 2n).
int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

Array2D<float> blur_with_kernel(const Array2D<float>& img, const std::vector<double>& k) {
  const int h = img.height(), w = img.width();
  const int radius = static_cast<int>(k.size()) / 2;
  Array2D<float> tmp(h, w), out(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += k[d + radius] * img(y, mirror(x + d, w));
      tmp(y, x) = static_cast<float>(acc);
    }
  }
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int d = -radius; d <= radius; ++d) acc += k[d + radius] * tmp(mirror(y + d, h), x);
      out(y, x) = static_cast<float>(acc);
    }
  }
  return out;
}

float sample_bilinear_clamped(const Array2D<float>& img, double sy, double sx) {
  const int h = img.height(), w = img.width();
  const double fy = std::floor(sy), fx = std::floor(sx);
  const double wy = sy - fy, wx = sx - fx;
  auto cl = [](int v, int hi) { return std::clamp(v, 0, hi); };
  const int y0 = cl(static_cast<int>(fy), h - 1), y1 = cl(static_cast<int>(fy) + 1, h - 1);
  const int x0 = cl(static_cast<int>(fx), w - 1), x1 = cl(static_cast<int>(fx) + 1, w - 1);
  return static_cast<float>((1 - wy) * ((1 - wx) * img(y0, x0) + wx * img(y0, x1)) +
                            wy * ((1 - wx) * img(y1, x0) + wx * img(y1, x1)));
}

}  // namespace

void TurbulenceParams::validate() const {
  auto req = [](bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(std::string("TurbulenceParams: ") + msg);
  };
  req(std::isfinite(tilt_strength) && tilt_strength >= 0, "tilt_strength must be >= 0");
  req(std::isfinite(tilt_smoothness) && tilt_smoothness > 0, "tilt_smoothness must be > 0");
  req(std::isfinite(blur_sigma) && blur_sigma >= 0, "blur_sigma must be >= 0");
  req(std::isfinite(noise_sigma) && noise_sigma >= 0, "noise_sigma must be >= 0");
  req(std::isfinite(temporal_correlation) && temporal_correlation >= 0 && temporal_correlation < 1,
      "temporal_correlation must be in [0,1)");
}

Array2D<float> gaussian_blur(const Array2D<float>& img, double sigma) {
  if (sigma <= 0.0) return img;
  return blur_with_kernel(img, gaussian_kernel(sigma));
}

TiltField random_tilt_field(int height, int width, const TurbulenceParams& params,
                            const TiltField* prev, uint64_t seed) {
  params.validate();
  if (height < 1 || width < 1)
    throw std::invalid_argument("random_tilt_field: dimensions must be positive");
  TiltField f{Array2D<float>(height, width, 0.0f), Array2D<float>(height, width, 0.0f)};
  if (params.tilt_strength == 0.0) return f;

  Rng rng(seed);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      f.dx(y, x) = static_cast<float>(rng.normal());
      f.dy(y, x) = static_cast<float>(rng.normal());
    }
  }
  f.dx = gaussian_blur(f.dx, params.tilt_smoothness);
  f.dy = gaussian_blur(f.dy, params.tilt_smoothness);

  const double c = params.temporal_correlation;
  if (prev && c > 0.0) {
    const double blend = std::sqrt(1.0 - c * c);
    for (size_t i = 0; i < f.dx.size(); ++i) {
      f.dx.data()[i] = static_cast<float>(c * prev->dx.data()[i] + blend * f.dx.data()[i]);
      f.dy.data()[i] = static_cast<float>(c * prev->dy.data()[i] + blend * f.dy.data()[i]);
    }
  }

  // Rescale so the largest displacement magnitude equals tilt_strength;
  // applied after the AR(1) blend so the bound holds frame by frame.
  double max_mag = 0.0;
  for (size_t i = 0; i < f.dx.size(); ++i) {
    const double m = std::hypot(static_cast<double>(f.dx.data()[i]), f.dy.data()[i]);
    max_mag = std::max(max_mag, m);
  }
  if (max_mag > 0.0) {
    const double s = params.tilt_strength / max_mag;
    for (size_t i = 0; i < f.dx.size(); ++i) {
      f.dx.data()[i] = static_cast<float>(f.dx.data()[i] * s);
      f.dy.data()[i] = static_cast<float>(f.dy.data()[i] * s);
    }
  }
  return f;
}

Frame distort_frame(const Frame& clean, const TiltField& tilt, const TurbulenceParams& params,
                    uint64_t noise_seed) {
  params.validate();
  const int h = clean.height(), w = clean.width();
  if (tilt.dx.height() != h || tilt.dx.width() != w)
    throw std::invalid_argument("distort_frame: tilt field dimensions do not match frame");

  Frame out;
  out.luma = Array2D<float>(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      out.luma(y, x) =
          sample_bilinear_clamped(clean.luma, y + tilt.dy(y, x), x + tilt.dx(y, x));

  if (params.blur_sigma > 0.0) out.luma = gaussian_blur(out.luma, params.blur_sigma);

  if (params.noise_sigma > 0.0) {
    Rng rng(noise_seed);
    for (size_t i = 0; i < out.luma.size(); ++i)
      out.luma.data()[i] =
          static_cast<float>(out.luma.data()[i] + params.noise_sigma * rng.normal());
  }
  for (size_t i = 0; i < out.luma.size(); ++i)
    out.luma.data()[i] = std::clamp(out.luma.data()[i], 0.0f, 1.0f);
  out.chroma = clean.chroma;
  return out;
}

std::pair<FrameSequence, FrameSequence> synthesize_sequence(const FrameSequence& clean,
                                                            int n_frames,
                                                            const TurbulenceParams& params,
                                                            uint64_t seed) {
  params.validate();
  clean.validate();
  if (n_frames < 1) throw std::invalid_argument("synthesize_sequence: n_frames must be >= 1");
  const bool is_static = clean.size() == 1;
  if (!is_static && clean.size() < n_frames)
    throw std::invalid_argument("synthesize_sequence: clean sequence shorter than n_frames");

  FrameSequence distorted, clean_out;
  distorted.frame_rate = clean.frame_rate;
  clean_out.frame_rate = clean.frame_rate;

  TiltField field;
  for (int t = 0; t < n_frames; ++t) {
    const Frame& src = is_static ? clean.frames.front() : clean.frames[t];
    field = random_tilt_field(src.height(), src.width(), params, t == 0 ? nullptr : &field,
                              derive_seed(seed, seed_stream::kSimTilt, t));
    distorted.frames.push_back(
        distort_frame(src, field, params, derive_seed(seed, seed_stream::kSimNoise, t)));
    clean_out.frames.push_back(src);
  }
  return {std::move(distorted), std::move(clean_out)};
}

}  // namespace turbdip
