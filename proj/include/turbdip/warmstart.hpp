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
#include <vector>

#include "turbdip/common.hpp"

// Warm starting across temporal blocks: block t >= 2 is initialized by
// first-order extrapolation of the trainable vectors learned by the two
// preceding blocks.

namespace turbdip {

template <typename S>
struct ParamHistory {
  static constexpr size_t kCapacity = 2;
  std::vector<std::pair<int, std::vector<S>>> entries;  // oldest first

  void push(int block_index, std::vector<S> params) {
    if (!entries.empty()) {
      if (block_index <= entries.back().first)
        throw std::invalid_argument("ParamHistory::push: block index " +
                                    std::to_string(block_index) + " not after " +
                                    std::to_string(entries.back().first));
      if (params.size() != entries.back().second.size())
        throw std::invalid_argument("ParamHistory::push: parameter length changed");
    }
    entries.emplace_back(block_index, std::move(params));
    if (entries.size() > kCapacity) entries.erase(entries.begin());
  }
};

enum class InitKind { FreshRandom, Copy, Predicted };

template <typename S>
struct InitSpec {
  InitKind kind = InitKind::FreshRandom;
  std::vector<S> params;  // empty for FreshRandom
};

/// 0 entries -> fresh random; 1 entry -> copy of it; 2 entries -> the
/// elementwise linear extrapolation 2*p[t-1] - p[t-2]. No clamping: the
/// optimizer owns any out-of-range values.
template <typename S>
InitSpec<S> predict_init(const ParamHistory<S>& h) {
  InitSpec<S> spec;
  if (h.entries.empty()) {
    spec.kind = InitKind::FreshRandom;
  } else if (h.entries.size() == 1) {
    spec.kind = InitKind::Copy;
    spec.params = h.entries.back().second;
  } else {
    const auto& prev2 = h.entries[h.entries.size() - 2].second;
    const auto& prev1 = h.entries.back().second;
    spec.kind = InitKind::Predicted;
    spec.params.resize(prev1.size());
    for (size_t i = 0; i < prev1.size(); ++i)
      spec.params[i] = static_cast<S>(2.0 * prev1[i] - prev2[i]);
  }
  return spec;
}

inline const char* init_kind_name(InitKind k) {
  switch (k) {
    case InitKind::FreshRandom: return "fresh";
    case InitKind::Copy: return "copy";
    case InitKind::Predicted: return "predicted";
  }
  return "?";
}

}  // namespace turbdip
