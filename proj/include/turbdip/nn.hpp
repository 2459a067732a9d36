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

#include <cassert>
#include <cmath>
#include <vector>

#include "turbdip/common.hpp"

// Layer primitives for the hourglass generator. Each layer keeps whatever
// the backward pass needs from the most recent forward call. Convolution
// weights are frozen, so conv backward only propagates to the input;
// BatchNorm additionally accumulates gradients for its affine parameters.

namespace turbdip::nn {

template <typename S>
struct Tensor {
  int c = 0, h = 0, w = 0;
  std::vector<S> v;

  Tensor() = default;
  Tensor(int c_, int h_, int w_) : c(c_), h(h_), w(w_), v(static_cast<size_t>(c_) * h_ * w_) {}

  S& at(int ci, int y, int x) { return v[(static_cast<size_t>(ci) * h + y) * w + x]; }
  const S& at(int ci, int y, int x) const {
    return v[(static_cast<size_t>(ci) * h + y) * w + x];
  }
  S* plane(int ci) { return v.data() + static_cast<size_t>(ci) * h * w; }
  const S* plane(int ci) const { return v.data() + static_cast<size_t>(ci) * h * w; }
  size_t size() const { return v.size(); }
  bool same_shape(const Tensor& o) const { return c == o.c && h == o.h && w == o.w; }
};

// ---------------------------------------------------------------------------

template <typename S>
struct Conv2d {
  int in_ch = 0, out_ch = 0, ksize = 3, stride = 1;
  std::vector<S> weight;  // [oc][ic][ky][kx]
  std::vector<S> bias;    // [oc]

  int pad() const { return ksize / 2; }
  size_t weight_count() const {
    return static_cast<size_t>(out_ch) * in_ch * ksize * ksize;
  }

  void init(int in, int out, int k, int s, Rng& rng) {
    in_ch = in;
    out_ch = out;
    ksize = k;
    stride = s;
    weight.resize(weight_count());
    bias.assign(out_ch, S(0));
    const double std_dev = std::sqrt(2.0 / (static_cast<double>(in) * k * k));
    for (auto& wv : weight) wv = static_cast<S>(rng.normal() * std_dev);
  }

  Tensor<S> forward(const Tensor<S>& x) {
    assert(x.c == in_ch);
    in_h_ = x.h;
    in_w_ = x.w;
    const int p = pad();
    const int oh = (x.h + 2 * p - ksize) / stride + 1;
    const int ow = (x.w + 2 * p - ksize) / stride + 1;
    Tensor<S> y(out_ch, oh, ow);
    // Per (ky, kx) tap: the in-bounds ox range is contiguous, so the inner
    // loop is branch-free row streaming.
    parallel_for(0, out_ch, [&](int oc0, int oc1) {
      for (int oc = oc0; oc < oc1; ++oc) {
        S* yplane = y.plane(oc);
        std::fill(yplane, yplane + static_cast<size_t>(oh) * ow, bias[oc]);
        for (int ic = 0; ic < in_ch; ++ic) {
          const S* xplane = x.plane(ic);
          const S* wp = &weight[(static_cast<size_t>(oc) * in_ch + ic) * ksize * ksize];
          for (int ky = 0; ky < ksize; ++ky) {
            for (int kx = 0; kx < ksize; ++kx) {
              const S wv = wp[ky * ksize + kx];
              const auto [ox_lo, ox_hi] = tap_range(kx, x.w, ow, p);
              for (int oy = 0; oy < oh; ++oy) {
                const int iy = oy * stride - p + ky;
                if (iy < 0 || iy >= x.h) continue;
                const S* xrow = xplane + static_cast<size_t>(iy) * x.w - p + kx;
                S* yrow = yplane + static_cast<size_t>(oy) * ow;
                if (stride == 1) {
                  for (int ox = ox_lo; ox < ox_hi; ++ox) yrow[ox] += wv * xrow[ox];
                } else {
                  for (int ox = ox_lo; ox < ox_hi; ++ox) yrow[ox] += wv * xrow[ox * stride];
                }
              }
            }
          }
        }
      }
    });
    return y;
  }

  /// Gradient with respect to the input only; the kernels are frozen.
  Tensor<S> backward_input(const Tensor<S>& gout) const {
    const int p = pad();
    Tensor<S> gx(in_ch, in_h_, in_w_);
    // Transposed taps: scatter each output-gradient row into the strided
    // input positions it was read from. One thread owns a whole input
    // plane, so the result does not depend on scheduling.
    parallel_for(0, in_ch, [&](int ic0, int ic1) {
      for (int ic = ic0; ic < ic1; ++ic) {
        S* gplane = gx.plane(ic);
        for (int oc = 0; oc < out_ch; ++oc) {
          const S* goplane = gout.plane(oc);
          const S* wp = &weight[(static_cast<size_t>(oc) * in_ch + ic) * ksize * ksize];
          for (int ky = 0; ky < ksize; ++ky) {
            for (int kx = 0; kx < ksize; ++kx) {
              const S wv = wp[ky * ksize + kx];
              const auto [ox_lo, ox_hi] = tap_range(kx, in_w_, gout.w, p);
              for (int oy = 0; oy < gout.h; ++oy) {
                const int iy = oy * stride - p + ky;
                if (iy < 0 || iy >= in_h_) continue;
                const S* grow = goplane + static_cast<size_t>(oy) * gout.w;
                S* xrow = gplane + static_cast<size_t>(iy) * in_w_ - p + kx;
                if (stride == 1) {
                  for (int ox = ox_lo; ox < ox_hi; ++ox) xrow[ox] += wv * grow[ox];
                } else {
                  for (int ox = ox_lo; ox < ox_hi; ++ox) xrow[ox * stride] += wv * grow[ox];
                }
              }
            }
          }
        }
      }
    });
    return gx;
  }

 private:
  /// Output-column range [lo, hi) whose input column ox*stride - pad + kx
  /// stays inside [0, in_w).
  std::pair<int, int> tap_range(int kx, int in_w, int out_w, int p) const {
    const int shift = kx - p;  // ix = ox*stride + shift
    int lo = 0;
    if (shift < 0) lo = (-shift + stride - 1) / stride;
    int hi = out_w;
    // Largest ox with ox*stride + shift <= in_w - 1.
    const int max_ix = in_w - 1 - shift;
    if (max_ix < 0)
      hi = 0;
    else
      hi = std::min(out_w, max_ix / stride + 1);
    return {std::min(lo, out_w), hi};
  }

  int in_h_ = 0, in_w_ = 0;
};

// ---------------------------------------------------------------------------
// Spatial batch normalization over a batch of one: statistics are the
// per-channel mean and population variance of the current activation map.
// gamma/beta are the trainable affine parameters.

template <typename S>
struct BatchNorm {
  std::vector<S> gamma, beta;
  std::vector<S> dgamma, dbeta;       // filled by backward()
  std::vector<double> mean, var;      // stats used by the latest forward
  static constexpr double kEps = 1e-5;

  int channels() const { return static_cast<int>(gamma.size()); }

  void init(int ch) {
    gamma.assign(ch, S(1));
    beta.assign(ch, S(0));
    dgamma.assign(ch, S(0));
    dbeta.assign(ch, S(0));
    mean.assign(ch, 0.0);
    var.assign(ch, 0.0);
  }

  Tensor<S> forward(const Tensor<S>& x) {
    assert(x.c == channels());
    const size_t n = static_cast<size_t>(x.h) * x.w;
    xhat_ = Tensor<S>(x.c, x.h, x.w);
    inv_std_.assign(x.c, 0.0);
    Tensor<S> y(x.c, x.h, x.w);
    parallel_for(0, x.c, [&](int c0, int c1) {
      for (int c = c0; c < c1; ++c) {
        const S* xp = x.plane(c);
        double s = 0.0, s2 = 0.0;
        for (size_t i = 0; i < n; ++i) {
          const double xv = xp[i];
          s += xv;
          s2 += xv * xv;
        }
        const double m = s / static_cast<double>(n);
        const double v = std::max(0.0, s2 / static_cast<double>(n) - m * m);
        mean[c] = m;
        var[c] = v;
        const double istd = 1.0 / std::sqrt(v + kEps);
        inv_std_[c] = istd;
        S* hp = xhat_.plane(c);
        S* yp = y.plane(c);
        const double g = gamma[c], b = beta[c];
        for (size_t i = 0; i < n; ++i) {
          const double h = (xp[i] - m) * istd;
          hp[i] = static_cast<S>(h);
          yp[i] = static_cast<S>(g * h + b);
        }
      }
    });
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) {
    assert(gy.same_shape(xhat_));
    const size_t n = static_cast<size_t>(gy.h) * gy.w;
    Tensor<S> gx(gy.c, gy.h, gy.w);
    parallel_for(0, gy.c, [&](int c0, int c1) {
      for (int c = c0; c < c1; ++c) {
        const S* gp = gy.plane(c);
        const S* hp = xhat_.plane(c);
        double sum_g = 0.0, sum_gh = 0.0;
        for (size_t i = 0; i < n; ++i) {
          sum_g += gp[i];
          sum_gh += static_cast<double>(gp[i]) * hp[i];
        }
        dbeta[c] = static_cast<S>(sum_g);
        dgamma[c] = static_cast<S>(sum_gh);
        // dL/dx via the batch statistics: both the mean and the variance
        // depend on every element of the channel.
        const double g = gamma[c];
        const double istd = inv_std_[c];
        const double mg = sum_g / static_cast<double>(n);
        const double mgh = sum_gh / static_cast<double>(n);
        S* op = gx.plane(c);
        for (size_t i = 0; i < n; ++i) {
          op[i] = static_cast<S>(g * istd * (gp[i] - mg - hp[i] * mgh));
        }
      }
    });
    return gx;
  }

 private:
  Tensor<S> xhat_;
  std::vector<double> inv_std_;
};

// ---------------------------------------------------------------------------

template <typename S>
struct LeakyRelu {
  double slope = 0.1;

  Tensor<S> forward(const Tensor<S>& x) {
    mask_.assign(x.size(), 0);
    Tensor<S> y(x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i) {
      const bool pos = x.v[i] > S(0);
      mask_[i] = pos;
      y.v[i] = pos ? x.v[i] : static_cast<S>(slope * x.v[i]);
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) const {
    Tensor<S> gx(gy.c, gy.h, gy.w);
    for (size_t i = 0; i < gy.size(); ++i)
      gx.v[i] = mask_[i] ? gy.v[i] : static_cast<S>(slope * gy.v[i]);
    return gx;
  }

 private:
  std::vector<uint8_t> mask_;
};

template <typename S>
struct Sigmoid {
  Tensor<S> forward(const Tensor<S>& x) {
    y_ = Tensor<S>(x.c, x.h, x.w);
    for (size_t i = 0; i < x.size(); ++i)
      y_.v[i] = static_cast<S>(1.0 / (1.0 + std::exp(-static_cast<double>(x.v[i]))));
    return y_;
  }

  Tensor<S> backward(const Tensor<S>& gy) const {
    Tensor<S> gx(gy.c, gy.h, gy.w);
    for (size_t i = 0; i < gy.size(); ++i) {
      const double s = y_.v[i];
      gx.v[i] = static_cast<S>(gy.v[i] * s * (1.0 - s));
    }
    return gx;
  }

 private:
  Tensor<S> y_;
};

// ---------------------------------------------------------------------------
// Bilinear 2x upsampling with half-pixel sample centers and edge clamping.
// The backward pass scatters with the transposed interpolation weights.

template <typename S>
struct BilinearUp2 {
  Tensor<S> forward(const Tensor<S>& x) {
    in_h_ = x.h;
    in_w_ = x.w;
    Tensor<S> y(x.c, x.h * 2, x.w * 2);
    for (int c = 0; c < x.c; ++c) {
      const S* xp = x.plane(c);
      S* yp = y.plane(c);
      for (int oy = 0; oy < y.h; ++oy) {
        int y0, y1;
        double fy;
        src_coords(oy, x.h, y0, y1, fy);
        for (int ox = 0; ox < y.w; ++ox) {
          int x0, x1;
          double fx;
          src_coords(ox, x.w, x0, x1, fx);
          const double v = (1 - fy) * ((1 - fx) * xp[y0 * x.w + x0] + fx * xp[y0 * x.w + x1]) +
                           fy * ((1 - fx) * xp[y1 * x.w + x0] + fx * xp[y1 * x.w + x1]);
          yp[oy * y.w + ox] = static_cast<S>(v);
        }
      }
    }
    return y;
  }

  Tensor<S> backward(const Tensor<S>& gy) const {
    Tensor<S> gx(gy.c, in_h_, in_w_);
    for (int c = 0; c < gy.c; ++c) {
      const S* gp = gy.plane(c);
      S* op = gx.plane(c);
      for (int oy = 0; oy < gy.h; ++oy) {
        int y0, y1;
        double fy;
        src_coords(oy, in_h_, y0, y1, fy);
        for (int ox = 0; ox < gy.w; ++ox) {
          int x0, x1;
          double fx;
          src_coords(ox, in_w_, x0, x1, fx);
          const double g = gp[oy * gy.w + ox];
          op[y0 * in_w_ + x0] += static_cast<S>((1 - fy) * (1 - fx) * g);
          op[y0 * in_w_ + x1] += static_cast<S>((1 - fy) * fx * g);
          op[y1 * in_w_ + x0] += static_cast<S>(fy * (1 - fx) * g);
          op[y1 * in_w_ + x1] += static_cast<S>(fy * fx * g);
        }
      }
    }
    return gx;
  }

 private:
  static void src_coords(int out, int in_dim, int& i0, int& i1, double& frac) {
    const double s = (out + 0.5) * 0.5 - 0.5;
    double fl = std::floor(s);
    frac = s - fl;
    i0 = static_cast<int>(fl);
    i1 = i0 + 1;
    if (i0 < 0) i0 = 0;
    if (i1 < 0) i1 = 0;
    if (i0 > in_dim - 1) i0 = in_dim - 1;
    if (i1 > in_dim - 1) i1 = in_dim - 1;
  }

  int in_h_ = 0, in_w_ = 0;
};

template <typename S>
Tensor<S> concat_channels(const Tensor<S>& a, const Tensor<S>& b) {
  assert(a.h == b.h && a.w == b.w);
  Tensor<S> y(a.c + b.c, a.h, a.w);
  std::copy(a.v.begin(), a.v.end(), y.v.begin());
  std::copy(b.v.begin(), b.v.end(), y.v.begin() + a.v.size());
  return y;
}

template <typename S>
void split_channels(const Tensor<S>& g, int c_front, Tensor<S>& ga, Tensor<S>& gb) {
  ga = Tensor<S>(c_front, g.h, g.w);
  gb = Tensor<S>(g.c - c_front, g.h, g.w);
  std::copy(g.v.begin(), g.v.begin() + ga.v.size(), ga.v.begin());
  std::copy(g.v.begin() + ga.v.size(), g.v.end(), gb.v.begin());
}

}  // namespace turbdip::nn
