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

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace turbdip {

/// I/O failures (missing files, undecodable images, write errors). CLI exit code 2.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite losses or gradients during fitting. CLI exit code 3.
struct NumericError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Dense row-major 2-D array. The workhorse for frames, masks, mosaics
/// and displacement fields.
template <typename T>
class Array2D {
 public:
  Array2D() = default;
  Array2D(int height, int width, T fill = T{})
      : h_(height), w_(width), v_(static_cast<size_t>(height) * width, fill) {
    if (height < 0 || width < 0) throw std::invalid_argument("Array2D: negative dimensions");
  }

  int height() const { return h_; }
  int width() const { return w_; }
  size_t size() const { return v_.size(); }
  bool empty() const { return v_.empty(); }

  T& operator()(int y, int x) { return v_[static_cast<size_t>(y) * w_ + x]; }
  const T& operator()(int y, int x) const { return v_[static_cast<size_t>(y) * w_ + x]; }

  T* data() { return v_.data(); }
  const T* data() const { return v_.data(); }

  bool same_shape(const Array2D& o) const { return h_ == o.h_ && w_ == o.w_; }

  bool operator==(const Array2D& o) const { return h_ == o.h_ && w_ == o.w_ && v_ == o.v_; }

  template <typename U>
  Array2D<U> cast() const {
    Array2D<U> out(h_, w_);
    for (size_t i = 0; i < v_.size(); ++i) out.data()[i] = static_cast<U>(v_[i]);
    return out;
  }

 private:
  int h_ = 0, w_ = 0;
  std::vector<T> v_;
};

// ---------------------------------------------------------------------------
// Deterministic random numbers. splitmix64 + Box-Muller keeps generated
// streams identical across platforms and standard library versions.
// ---------------------------------------------------------------------------

inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed derivation: every consumer of randomness gets
/// `derive_seed(master, stream, counter)` where `stream` identifies the
/// subsystem (see seed_stream below) and `counter` indexes within it.
/// Reruns with the same master seed reproduce every substream.
inline uint64_t derive_seed(uint64_t master, uint32_t stream, uint64_t counter) {
  uint64_t s = master;
  (void)splitmix64(s);
  s ^= 0x632be59bd9b4e019ULL * (stream + 1);
  (void)splitmix64(s);
  s ^= 0x9e3779b97f4a7c15ULL * (counter + 1);
  return splitmix64(s);
}

namespace seed_stream {
constexpr uint32_t kGeneratorWeights = 0;  // frozen network draw, once per run
constexpr uint32_t kBlockInit = 1;         // per-block trainable init, counter = block index
constexpr uint32_t kSimTilt = 2;           // per-frame tilt fields
constexpr uint32_t kSimNoise = 3;          // per-frame observation noise
}  // namespace seed_stream

class Rng {
 public:
  explicit Rng(uint64_t seed) : state_(seed) {}

  uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; second deviate cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01(), u2 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Internal parallelism. TURBDIP_THREADS caps the worker count; work is split
// into contiguous static ranges so results do not depend on thread count.
// ---------------------------------------------------------------------------

/// Worker cap: TURBDIP_THREADS if set and >= 1, otherwise hardware concurrency.
int max_threads();

/// Runs fn(begin, end) over disjoint contiguous subranges of [begin, end),
/// possibly on several threads. fn must only write state owned by its range.
void parallel_for(int begin, int end, const std::function<void(int, int)>& fn);

/// FNV-1a over raw bytes; used to assert frozen weights stay untouched.
uint64_t fnv1a(const void* data, size_t bytes);

}  // namespace turbdip
