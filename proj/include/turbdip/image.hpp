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

#include <array>
#include <optional>
#include <vector>

#include "turbdip/common.hpp"

namespace turbdip {

/// Single-channel frame in [0,1]. Color inputs keep their two
/// color-difference planes (Cb, Cr) so they can be re-attached after
/// processing; all numerics run on luma only.
struct Frame {
  Array2D<float> luma;
  std::optional<std::array<Array2D<float>, 2>> chroma;  // {Cb, Cr}

  int height() const { return luma.height(); }
  int width() const { return luma.width(); }
};

struct FrameSequence {
  std::vector<Frame> frames;
  std::optional<double> frame_rate;  // metadata only

  int size() const { return static_cast<int>(frames.size()); }
  int height() const { return frames.empty() ? 0 : frames.front().height(); }
  int width() const { return frames.empty() ? 0 : frames.front().width(); }
  bool has_chroma() const { return !frames.empty() && frames.front().chroma.has_value(); }

  /// Enforces: length >= 1, uniform dimensions, chroma on all frames or none.
  void validate() const;
};

/// Boolean background masks (nonzero = background). Either one mask per
/// frame or a single mask broadcast over the whole sequence.
struct MaskSequence {
  std::vector<Array2D<uint8_t>> masks;
  int logical_length = 0;

  int size() const { return logical_length; }
  const Array2D<uint8_t>& mask_for(int frame_index) const {
    return masks.size() == 1 ? masks.front() : masks[frame_index];
  }
};

}  // namespace turbdip
