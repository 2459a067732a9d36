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

#include "turbdip/metrics.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace turbdip {

double background_variance(const FrameSequence& seq, const MaskSequence& masks,
                           int* n_pixels_out) {
  seq.validate();
  const int n = seq.size();
  if (masks.size() != n)
    throw std::invalid_argument("background_variance: mask count does not match sequence");
  const int h = seq.height(), w = seq.width();
  for (const auto& m : masks.masks) {
    if (m.height() != h || m.width() != w)
      throw std::invalid_argument("background_variance: mask dimensions do not match frames");
  }

  double total = 0.0;
  long qualifying = 0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      // Temporal series of this location over the frames where it is
      // background, on the 0-255 scale. Population variance over its own
      // sample count, two-pass so constant series come out exactly zero.
      double s = 0.0, lo = 0.0, hi = 0.0;
      int count = 0;
      for (int t = 0; t < n; ++t) {
        if (!masks.mask_for(t)(y, x)) continue;
        const double v = seq.frames[t].luma(y, x) * 255.0;
        s += v;
        lo = count == 0 ? v : std::min(lo, v);
        hi = count == 0 ? v : std::max(hi, v);
        ++count;
      }
      if (count < 2) continue;
      ++qualifying;
      if (lo == hi) continue;  // constant series: variance 0
      const double mean = s / count;
      double dev = 0.0;
      for (int t = 0; t < n; ++t) {
        if (!masks.mask_for(t)(y, x)) continue;
        const double d = seq.frames[t].luma(y, x) * 255.0 - mean;
        dev += d * d;
      }
      total += dev / count;
    }
  }
  if (n_pixels_out) *n_pixels_out = static_cast<int>(qualifying);
  if (qualifying == 0)
    throw std::invalid_argument(
        "background_variance: no pixel is background in two or more frames");
  return total / static_cast<double>(qualifying);
}

double psnr(const Frame& a, const Frame& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("psnr: frame dimensions differ");
  double se = 0.0;
  const size_t n = a.luma.size();
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(a.luma.data()[i]) - b.luma.data()[i];
    se += d * d;
  }
  const double mse = se / static_cast<double>(n);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

double ssim(const Frame& a, const Frame& b) {
  if (a.height() != b.height() || a.width() != b.width())
    throw std::invalid_argument("ssim: frame dimensions differ");
  const int h = a.height(), w = a.width();
  constexpr int kWin = 11;
  if (h < kWin || w < kWin)
    throw std::invalid_argument("ssim: frame smaller than the 11x11 window");

  // 11x11 Gaussian weights, sigma 1.5, normalized.
  double kernel[kWin][kWin];
  double ksum = 0.0;
  for (int i = 0; i < kWin; ++i) {
    for (int j = 0; j < kWin; ++j) {
      const double dy = i - kWin / 2, dx = j - kWin / 2;
      kernel[i][j] = std::exp(-(dy * dy + dx * dx) / (2.0 * 1.5 * 1.5));
      ksum += kernel[i][j];
    }
  }
  for (auto& row : kernel)
    for (double& v : row) v /= ksum;

  constexpr double kC1 = 0.01 * 0.01;  // (k1*L)^2, L = 1
  constexpr double kC2 = 0.03 * 0.03;

  double acc = 0.0;
  long count = 0;
  for (int y = 0; y + kWin <= h; ++y) {
    for (int x = 0; x + kWin <= w; ++x) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < kWin; ++i) {
        for (int j = 0; j < kWin; ++j) {
          const double k = kernel[i][j];
          const double va = a.luma(y + i, x + j);
          const double vb = b.luma(y + i, x + j);
          ma += k * va;
          mb += k * vb;
          saa += k * va * va;
          sbb += k * vb * vb;
          sab += k * va * vb;
        }
      }
      const double var_a = saa - ma * ma;
      const double var_b = sbb - mb * mb;
      const double cov = sab - ma * mb;
      const double val = ((2 * ma * mb + kC1) * (2 * cov + kC2)) /
                         ((ma * ma + mb * mb + kC1) * (var_a + var_b + kC2));
      acc += val;
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

std::string MetricsReport::to_text() const {
  std::ostringstream os;
  os.precision(9);
  os << "turbdip.metrics.version 1\n";
  if (background_var) {
    os << "background_var " << *background_var << "\n";
    os << "n_background_pixels " << n_background_pixels << "\n";
  }
  if (per_frame_psnr) {
    for (size_t i = 0; i < per_frame_psnr->size(); ++i)
      os << "psnr." << i << " " << (*per_frame_psnr)[i] << "\n";
  }
  if (mean_psnr) os << "mean_psnr " << *mean_psnr << "\n";
  if (mean_ssim) os << "mean_ssim " << *mean_ssim << "\n";
  if (external_biqi) os << "external_biqi " << *external_biqi << "\n";
  return os.str();
}

}  // namespace turbdip
