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

#include <deque>
#include <limits>
#include <optional>
#include <vector>

#include "turbdip/generator.hpp"
#include "turbdip/tv.hpp"

namespace turbdip {

struct OptimizerConfig {
  double lambda = 0.1;
  int max_epoch = 200;
  double learning_rate = 0.01;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const {
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
      throw std::invalid_argument("OptimizerConfig: lambda must be finite and >= 0");
    if (max_epoch < 1) throw std::invalid_argument("OptimizerConfig: max_epoch must be >= 1");
    if (!(learning_rate > 0.0))
      throw std::invalid_argument("OptimizerConfig: learning_rate must be > 0");
  }
};

struct EsConfig {
  int patience = 50;
  int patience_start = 50;
  double alpha = 0.1;  // EMA smoothing of the variance curve
  int window = 25;     // ring buffer length

  void validate() const {
    if (patience < 1) throw std::invalid_argument("EsConfig: patience must be >= 1");
    if (patience_start < 0) throw std::invalid_argument("EsConfig: patience_start must be >= 0");
    if (!(alpha > 0.0 && alpha <= 1.0))
      throw std::invalid_argument("EsConfig: alpha must be in (0, 1]");
    if (window < 1) throw std::invalid_argument("EsConfig: window must be >= 1");
  }
};

// ---------------------------------------------------------------------------

template <typename S>
struct AdamState {
  std::vector<double> m, v;
  int t = 0;
};

/// Bias-corrected adaptive-moment step, in place. Deterministic.
template <typename S>
void adam_step(ParamVector<S>& params, const ParamVector<S>& grad, AdamState<S>& st,
               const OptimizerConfig& cfg) {
  if (params.size() != grad.size())
    throw std::invalid_argument("adam_step: parameter/gradient length mismatch");
  if (st.m.empty()) {
    st.m.assign(params.size(), 0.0);
    st.v.assign(params.size(), 0.0);
  }
  for (double g : grad) {
    if (!std::isfinite(g)) throw NumericError("adam_step: non-finite gradient");
  }
  st.t += 1;
  const double b1 = cfg.adam_beta1, b2 = cfg.adam_beta2;
  const double corr1 = 1.0 - std::pow(b1, st.t);
  const double corr2 = 1.0 - std::pow(b2, st.t);
  for (size_t i = 0; i < params.size(); ++i) {
    const double g = grad[i];
    st.m[i] = b1 * st.m[i] + (1.0 - b1) * g;
    st.v[i] = b2 * st.v[i] + (1.0 - b2) * g * g;
    const double mhat = st.m[i] / corr1;
    const double vhat = st.v[i] / corr2;
    params[i] = static_cast<S>(params[i] - cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.adam_eps));
  }
}

// ---------------------------------------------------------------------------
// Windowed-moving-variance early stopping. Each iteration's output joins a
// ring of the last `window` outputs; once the ring is full the mean (over
// pixels) of the per-pixel variance across the ring is smoothed with an EMA
// and its running minimum is tracked from `patience_start` onwards. Fitting
// stops after `patience` iterations without a new minimum. Ties are not
// improvements.

enum class EsDecision { Continue, Stop };

template <typename S>
struct EsState {
  std::deque<Array2D<S>> ring;
  std::vector<double> pix_sum, pix_sumsq;

  bool have_var = false;
  double raw_var = 0.0;
  double smooth_var = 0.0;

  bool tracking = false;
  double best_var = std::numeric_limits<double>::infinity();
  int best_iter = -1;
  std::optional<ParamVector<S>> best_params;
  std::optional<Array2D<S>> best_output;

  int since_best(int iter) const { return tracking ? iter - best_iter : 0; }
};

/// Minimum-tracking core, exposed separately so the stopping rule can be
/// driven with injected variance values. `iter` starts at 1 and increases
/// by one per call.
template <typename S>
EsDecision es_track(EsState<S>& es, double smooth_var, int iter, const EsConfig& cfg,
                    const ParamVector<S>* params, const Array2D<S>* output) {
  if (iter < cfg.patience_start) return EsDecision::Continue;
  if (!es.tracking || smooth_var < es.best_var) {
    es.tracking = true;
    es.best_var = smooth_var;
    es.best_iter = iter;
    if (params) es.best_params = *params;
    if (output) es.best_output = *output;
  }
  return (iter - es.best_iter >= cfg.patience) ? EsDecision::Stop : EsDecision::Continue;
}

template <typename S>
EsDecision es_update(EsState<S>& es, const Array2D<S>& output, const ParamVector<S>& params,
                     int iter, const EsConfig& cfg) {
  const size_t n = output.size();
  if (es.pix_sum.empty()) {
    es.pix_sum.assign(n, 0.0);
    es.pix_sumsq.assign(n, 0.0);
  }
  es.ring.push_back(output);
  for (size_t i = 0; i < n; ++i) {
    const double v = output.data()[i];
    es.pix_sum[i] += v;
    es.pix_sumsq[i] += v * v;
  }
  if (static_cast<int>(es.ring.size()) > cfg.window) {
    const Array2D<S>& old = es.ring.front();
    for (size_t i = 0; i < n; ++i) {
      const double v = old.data()[i];
      es.pix_sum[i] -= v;
      es.pix_sumsq[i] -= v * v;
    }
    es.ring.pop_front();
  }
  if (static_cast<int>(es.ring.size()) < cfg.window) return EsDecision::Continue;

  const double inv_w = 1.0 / cfg.window;
  double acc = 0.0;
  for (size_t i = 0; i < n; ++i) {
    const double mean = es.pix_sum[i] * inv_w;
    acc += std::max(0.0, es.pix_sumsq[i] * inv_w - mean * mean);
  }
  const double raw = acc / static_cast<double>(n);
  es.smooth_var = es.have_var ? cfg.alpha * raw + (1.0 - cfg.alpha) * es.smooth_var : raw;
  es.raw_var = raw;
  es.have_var = true;
  return es_track(es, es.smooth_var, iter, cfg, &params, &output);
}

// ---------------------------------------------------------------------------

template <typename S>
struct BlockFitResult {
  Array2D<S> restored_mosaic;   // output at the variance minimum
  ParamVector<S> final_params;  // parameters at the stop iteration
  ParamVector<S> best_params;   // parameters at the variance minimum
  int stop_iter = 0;
  int best_iter = 0;
  std::vector<double> loss_trace;
  std::vector<double> raw_var_trace;     // NaN until the ring fills
  std::vector<double> smooth_var_trace;  // likewise
};

/// Optional per-iteration tap, used for trace files and quality probes.
template <typename S>
using FitObserver =
    std::function<void(int iter, double loss, double raw_var, double smooth_var,
                       const Array2D<S>& output)>;

/// Fits one mosaic: forward / loss+gradient / Adam / early-stop per
/// iteration. `init` empty means fresh-random trainables from
/// `trainable_seed`; `generator_seed` fixes the frozen weights and must be
/// shared by every block of a run for warm starts to be meaningful.
template <typename S>
BlockFitResult<S> fit_block(const std::optional<ParamVector<S>>& init, const Array2D<S>& target,
                            const HourglassConfig& gen_cfg, const OptimizerConfig& opt_cfg,
                            const EsConfig& es_cfg, uint64_t generator_seed,
                            uint64_t trainable_seed, const FitObserver<S>& observer = nullptr) {
  opt_cfg.validate();
  es_cfg.validate();
  GeneratorState<S> st = init_generator<S>(gen_cfg, target.height(), target.width(), generator_seed);
  if (init.has_value())
    set_params(st, *init);
  else
    randomize_trainables(st, trainable_seed);

  ParamVector<S> params = get_params(st);
  AdamState<S> adam;
  EsState<S> es;

  BlockFitResult<S> r;
  Array2D<S> last_output;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  int iter = 0;
  try {
    for (iter = 1; iter <= opt_cfg.max_epoch; ++iter) {
      EvalResult<S> ev = loss_and_gradients(st, target, opt_cfg.lambda);
      EsDecision d = es_update(es, ev.output, params, iter, es_cfg);
      r.loss_trace.push_back(ev.loss);
      r.raw_var_trace.push_back(es.have_var ? es.raw_var : nan);
      r.smooth_var_trace.push_back(es.have_var ? es.smooth_var : nan);
      if (observer)
        observer(iter, ev.loss, es.have_var ? es.raw_var : nan,
                 es.have_var ? es.smooth_var : nan, ev.output);
      r.stop_iter = iter;
      last_output = std::move(ev.output);
      // Parameters are only advanced when another evaluation follows, so
      // final_params always match the last evaluated output.
      if (d == EsDecision::Stop || iter == opt_cfg.max_epoch) break;
      adam_step(params, ev.grad, adam, opt_cfg);
      set_params(st, params);
    }
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (iteration " + std::to_string(iter) + ")");
  }

  r.final_params = params;
  if (es.best_params.has_value()) {
    r.best_iter = es.best_iter;
    r.best_params = *es.best_params;
    r.restored_mosaic = *es.best_output;
  } else {
    // Run too short for the variance window / tracking start: fall back to
    // the last iterate.
    r.best_iter = r.stop_iter;
    r.best_params = params;
    r.restored_mosaic = std::move(last_output);
  }
  return r;
}

}  // namespace turbdip
