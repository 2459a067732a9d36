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

#include <string>
#include <vector>

#include "turbdip/common.hpp"
#include "turbdip/nn.hpp"
#include "turbdip/tv.hpp"

// The untrained hourglass generator. Convolution kernels are drawn once and
// frozen; only the latent input and the BatchNorm affine parameters are ever
// optimized. The flat trainable vector is laid out as
//
//   [ z (channel-major, row-major) |
//     per BatchNorm layer in network order: gamma then beta ]
//
// where network order is: encoder BNs 0..scales-1, skip BNs 0..scales-1,
// decoder BNs 0..scales-1.

namespace turbdip {

struct HourglassConfig {
  int scales = 3;
  int channels = 32;
  int skip_channels = 4;
  int kernel = 3;
  int latent_channels = 16;
  double leaky_slope = 0.1;

  void validate() const {
    if (scales < 1 || channels < 1 || latent_channels < 1 || skip_channels < 0 || kernel < 1 ||
        kernel % 2 == 0)
      throw std::invalid_argument("HourglassConfig: invalid field");
  }
  bool operator==(const HourglassConfig&) const = default;
};

template <typename S>
struct GeneratorState {
  HourglassConfig config;
  int mosaic_h = 0, mosaic_w = 0;

  std::vector<nn::Conv2d<S>> enc_conv;
  std::vector<nn::BatchNorm<S>> enc_bn;
  std::vector<nn::LeakyRelu<S>> enc_act;
  std::vector<nn::Conv2d<S>> skip_conv;
  std::vector<nn::BatchNorm<S>> skip_bn;
  std::vector<nn::LeakyRelu<S>> skip_act;
  std::vector<nn::Conv2d<S>> dec_conv;
  std::vector<nn::BatchNorm<S>> dec_bn;
  std::vector<nn::LeakyRelu<S>> dec_act;
  std::vector<nn::BilinearUp2<S>> up;
  nn::Conv2d<S> out_conv;
  nn::Sigmoid<S> out_sig;

  nn::Tensor<S> z;

  bool has_skips() const { return config.skip_channels > 0; }

  std::vector<nn::BatchNorm<S>*> bn_layers() {
    std::vector<nn::BatchNorm<S>*> out;
    for (auto& b : enc_bn) out.push_back(&b);
    for (auto& b : skip_bn) out.push_back(&b);
    for (auto& b : dec_bn) out.push_back(&b);
    return out;
  }
  std::vector<const nn::BatchNorm<S>*> bn_layers() const {
    std::vector<const nn::BatchNorm<S>*> out;
    for (auto& b : enc_bn) out.push_back(&b);
    for (auto& b : skip_bn) out.push_back(&b);
    for (auto& b : dec_bn) out.push_back(&b);
    return out;
  }
};

template <typename S>
using ParamVector = std::vector<S>;

template <typename S>
struct EvalResult {
  Array2D<S> output;
  double loss = 0.0;
  double data_term = 0.0;
  double tv_value = 0.0;  // unweighted TV of the output
  ParamVector<S> grad;
};

// ---------------------------------------------------------------------------

template <typename S>
size_t trainable_count(const GeneratorState<S>& st) {
  size_t n = st.z.size();
  for (const auto* bn : st.bn_layers()) n += 2 * static_cast<size_t>(bn->channels());
  return n;
}

/// Hash over all frozen convolution weights and biases, in layer order.
template <typename S>
uint64_t frozen_checksum(const GeneratorState<S>& st) {
  uint64_t h = 0x6a09e667f3bcc908ULL;
  auto mix = [&h](const std::vector<S>& v) {
    uint64_t piece = fnv1a(v.data(), v.size() * sizeof(S));
    h ^= piece + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  auto mix_conv = [&](const nn::Conv2d<S>& c) {
    mix(c.weight);
    mix(c.bias);
  };
  for (const auto& c : st.enc_conv) mix_conv(c);
  for (const auto& c : st.skip_conv) mix_conv(c);
  for (const auto& c : st.dec_conv) mix_conv(c);
  mix_conv(st.out_conv);
  return h;
}

/// Resets the trainables only: gamma = 1, beta = 0, z ~ Uniform[0, 0.1).
/// The frozen convolution weights are left untouched, so two states built
/// from the same generator seed stay interchangeable for warm starting.
template <typename S>
void randomize_trainables(GeneratorState<S>& st, uint64_t seed) {
  Rng rng(seed);
  for (auto& zv : st.z.v) zv = static_cast<S>(rng.uniform(0.0, 0.1));
  for (auto* bn : st.bn_layers()) {
    std::fill(bn->gamma.begin(), bn->gamma.end(), S(1));
    std::fill(bn->beta.begin(), bn->beta.end(), S(0));
  }
}

template <typename S>
GeneratorState<S> init_generator(const HourglassConfig& cfg, int mosaic_h, int mosaic_w,
                                 uint64_t seed) {
  cfg.validate();
  if (mosaic_h < 1 || mosaic_w < 1)
    throw std::invalid_argument("init_generator: mosaic dimensions must be positive");
  const int div = 1 << cfg.scales;
  if (mosaic_h % div != 0 || mosaic_w % div != 0)
    throw std::invalid_argument("init_generator: mosaic " + std::to_string(mosaic_h) + "x" +
                                std::to_string(mosaic_w) + " not divisible by 2^scales = " +
                                std::to_string(div));

  GeneratorState<S> st;
  st.config = cfg;
  st.mosaic_h = mosaic_h;
  st.mosaic_w = mosaic_w;

  Rng rng(seed);
  const int n = cfg.scales;
  st.enc_conv.resize(n);
  st.enc_bn.resize(n);
  st.enc_act.resize(n);
  st.dec_conv.resize(n);
  st.dec_bn.resize(n);
  st.dec_act.resize(n);
  st.up.resize(n);
  if (cfg.skip_channels > 0) {
    st.skip_conv.resize(n);
    st.skip_bn.resize(n);
    st.skip_act.resize(n);
  }

  for (int i = 0; i < n; ++i) {
    const int in = (i == 0) ? cfg.latent_channels : cfg.channels;
    st.enc_conv[i].init(in, cfg.channels, cfg.kernel, 2, rng);
    st.enc_bn[i].init(cfg.channels);
    st.enc_act[i].slope = cfg.leaky_slope;
  }
  if (cfg.skip_channels > 0) {
    for (int i = 0; i < n; ++i) {
      const int in = (i == 0) ? cfg.latent_channels : cfg.channels;
      st.skip_conv[i].init(in, cfg.skip_channels, 1, 1, rng);
      st.skip_bn[i].init(cfg.skip_channels);
      st.skip_act[i].slope = cfg.leaky_slope;
    }
  }
  for (int i = 0; i < n; ++i) {
    st.dec_conv[i].init(cfg.channels + cfg.skip_channels, cfg.channels, cfg.kernel, 1, rng);
    st.dec_bn[i].init(cfg.channels);
    st.dec_act[i].slope = cfg.leaky_slope;
  }
  st.out_conv.init(cfg.channels, 1, 1, 1, rng);

  st.z = nn::Tensor<S>(cfg.latent_channels, mosaic_h, mosaic_w);
  randomize_trainables(st, rng.next_u64());
  return st;
}

// ---------------------------------------------------------------------------

namespace detail {

/// Runs the network on st.z, leaving the per-layer saved state populated
/// for a subsequent backward pass. Returns the 1xHxW output tensor.
template <typename S>
nn::Tensor<S> forward_tensor(GeneratorState<S>& st) {
  const int n = st.config.scales;
  nn::Tensor<S> a = st.z;
  std::vector<nn::Tensor<S>> skips(n);
  for (int i = 0; i < n; ++i) {
    if (st.has_skips())
      skips[i] = st.skip_act[i].forward(st.skip_bn[i].forward(st.skip_conv[i].forward(a)));
    a = st.enc_act[i].forward(st.enc_bn[i].forward(st.enc_conv[i].forward(a)));
  }
  for (int i = n - 1; i >= 0; --i) {
    nn::Tensor<S> u = st.up[i].forward(a);
    nn::Tensor<S> cat = st.has_skips() ? nn::concat_channels(u, skips[i]) : std::move(u);
    a = st.dec_act[i].forward(st.dec_bn[i].forward(st.dec_conv[i].forward(cat)));
  }
  return st.out_sig.forward(st.out_conv.forward(a));
}

/// Backpropagates dL/d(output tensor) to the trainables. BN affine
/// gradients land in the layers' dgamma/dbeta; the return value is dL/dz.
template <typename S>
nn::Tensor<S> backward_tensor(GeneratorState<S>& st, const nn::Tensor<S>& dout) {
  const int n = st.config.scales;
  nn::Tensor<S> g = st.out_sig.backward(dout);
  g = st.out_conv.backward_input(g);

  std::vector<nn::Tensor<S>> skip_grads(n);
  for (int i = 0; i < n; ++i) {
    g = st.dec_conv[i].backward_input(st.dec_bn[i].backward(st.dec_act[i].backward(g)));
    if (st.has_skips()) {
      nn::Tensor<S> g_up, g_skip;
      nn::split_channels(g, st.config.channels, g_up, g_skip);
      skip_grads[i] = std::move(g_skip);
      g = st.up[i].backward(g_up);
    } else {
      g = st.up[i].backward(g);
    }
  }
  for (int i = n - 1; i >= 0; --i) {
    g = st.enc_conv[i].backward_input(st.enc_bn[i].backward(st.enc_act[i].backward(g)));
    if (st.has_skips()) {
      nn::Tensor<S> sg = st.skip_conv[i].backward_input(
          st.skip_bn[i].backward(st.skip_act[i].backward(skip_grads[i])));
      for (size_t k = 0; k < g.size(); ++k) g.v[k] += sg.v[k];
    }
  }
  return g;
}

template <typename S>
Array2D<S> tensor_to_plane(const nn::Tensor<S>& t) {
  Array2D<S> out(t.h, t.w);
  std::copy(t.v.begin(), t.v.end(), out.data());
  return out;
}

}  // namespace detail

template <typename S>
Array2D<S> forward(GeneratorState<S>& st) {
  return detail::tensor_to_plane(detail::forward_tensor(st));
}

template <typename S>
ParamVector<S> get_params(const GeneratorState<S>& st) {
  ParamVector<S> p;
  p.reserve(trainable_count(st));
  p.insert(p.end(), st.z.v.begin(), st.z.v.end());
  for (const auto* bn : st.bn_layers()) {
    p.insert(p.end(), bn->gamma.begin(), bn->gamma.end());
    p.insert(p.end(), bn->beta.begin(), bn->beta.end());
  }
  return p;
}

template <typename S>
void set_params(GeneratorState<S>& st, const ParamVector<S>& p) {
  if (p.size() != trainable_count(st))
    throw std::invalid_argument("set_params: expected " + std::to_string(trainable_count(st)) +
                                " values, got " + std::to_string(p.size()));
  auto it = p.begin();
  std::copy(it, it + st.z.size(), st.z.v.begin());
  it += st.z.size();
  for (auto* bn : st.bn_layers()) {
    std::copy(it, it + bn->gamma.size(), bn->gamma.begin());
    it += bn->gamma.size();
    std::copy(it, it + bn->beta.size(), bn->beta.begin());
    it += bn->beta.size();
  }
}

/// Number of in-bounds neighbor pairs the TV sum runs over.
inline double tv_pair_count(int h, int w) {
  return static_cast<double>(h - 1) * w + static_cast<double>(h) * (w - 1);
}

/// One fitting evaluation: forward pass, composite loss, and the exact
/// reverse-mode gradient with respect to the trainable vector.
///
/// loss = mean((output - target)^2) + lambda * TV(output) / pair_count:
/// both terms are means over their own index sets (pixels, neighbor
/// pairs), so lambda weighs comparable per-element scales at any mosaic
/// size.
template <typename S>
EvalResult<S> loss_and_gradients(GeneratorState<S>& st, const Array2D<S>& target, double lambda) {
  if (target.height() != st.mosaic_h || target.width() != st.mosaic_w)
    throw std::invalid_argument("loss_and_gradients: target dims do not match generator output");

  nn::Tensor<S> out_t = detail::forward_tensor(st);
  EvalResult<S> r;
  r.output = detail::tensor_to_plane(out_t);

  const size_t n = r.output.size();
  double se = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(r.output.data()[i]) - target.data()[i];
    se += d * d;
  }
  r.data_term = se / static_cast<double>(n);
  r.tv_value = tv(r.output);
  const double pairs = std::max(1.0, tv_pair_count(st.mosaic_h, st.mosaic_w));
  r.loss = r.data_term + lambda * r.tv_value / pairs;
  if (!std::isfinite(r.loss)) throw NumericError("loss_and_gradients: non-finite loss");

  Array2D<S> dout(st.mosaic_h, st.mosaic_w, S(0));
  const double inv_n = 1.0 / static_cast<double>(n);
  for (size_t i = 0; i < n; ++i) {
    dout.data()[i] = static_cast<S>(
        2.0 * inv_n * (static_cast<double>(r.output.data()[i]) - target.data()[i]));
  }
  if (lambda != 0.0) add_tv_subgradient(r.output, lambda / pairs, dout);

  nn::Tensor<S> dout_t(1, st.mosaic_h, st.mosaic_w);
  std::copy(dout.data(), dout.data() + n, dout_t.v.begin());
  nn::Tensor<S> gz = detail::backward_tensor(st, dout_t);

  r.grad.reserve(trainable_count(st));
  r.grad.insert(r.grad.end(), gz.v.begin(), gz.v.end());
  for (auto* bn : st.bn_layers()) {
    r.grad.insert(r.grad.end(), bn->dgamma.begin(), bn->dgamma.end());
    r.grad.insert(r.grad.end(), bn->dbeta.begin(), bn->dbeta.end());
  }
  return r;
}

// ---------------------------------------------------------------------------
// Checkpointing. The frozen weights are reproducible from the seed, so a
// checkpoint is (config, dims, seed, trainables) behind a versioned magic.

void save_checkpoint(const std::string& path, const HourglassConfig& cfg, int mosaic_h,
                     int mosaic_w, uint64_t seed, const std::vector<double>& params);

struct Checkpoint {
  HourglassConfig config;
  int mosaic_h = 0, mosaic_w = 0;
  uint64_t seed = 0;
  std::vector<double> params;
};

Checkpoint load_checkpoint(const std::string& path);

}  // namespace turbdip
