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

namespace turbdip {

/// Interlace factors of the temporal mosaic: gy * gx frames per tile.
struct MosaicGrid {
  int gy = 1;
  int gx = 1;

  int block_size() const { return gy * gx; }
  bool operator==(const MosaicGrid&) const = default;
};

/// Most-square factor pair (gy, gx) with gy*gx == t and gy >= gx.
/// Prime t degenerates to row interlacing (t, 1).
inline MosaicGrid grid_for_block_size(int t) {
  if (t < 1) throw std::invalid_argument("grid_for_block_size: block size must be >= 1");
  for (int d = static_cast<int>(std::sqrt(static_cast<double>(t))); d >= 1; --d) {
    if (t % d == 0) return MosaicGrid{t / d, d};
  }
  return MosaicGrid{t, 1};
}

/// A block of t h*w frames interlaced into one (h*gy) x (w*gx) image.
/// Pixel (i,j) of frame k = dy*gx + dx lands at (i*gy + dy, j*gx + dx),
/// so the t temporal samples of each location share one gy x gx tile.
template <typename T>
struct MosaicT {
  Array2D<T> data;
  MosaicGrid grid;
  int block_frames = 0;
  int frame_height = 0;
  int frame_width = 0;
};

using Mosaic = MosaicT<float>;

template <typename T>
MosaicT<T> shuffle_block(const std::vector<Array2D<T>>& frames, MosaicGrid grid) {
  const int t = static_cast<int>(frames.size());
  if (t == 0 || t != grid.block_size()) {
    throw std::invalid_argument("shuffle_block: frame count " + std::to_string(t) +
                                " does not match grid " + std::to_string(grid.gy) + "x" +
                                std::to_string(grid.gx));
  }
  const int h = frames[0].height(), w = frames[0].width();
  for (const auto& f : frames) {
    if (f.height() != h || f.width() != w)
      throw std::invalid_argument("shuffle_block: frames differ in size");
  }
  MosaicT<T> m;
  m.grid = grid;
  m.block_frames = t;
  m.frame_height = h;
  m.frame_width = w;
  m.data = Array2D<T>(h * grid.gy, w * grid.gx);
  for (int k = 0; k < t; ++k) {
    const int dy = k / grid.gx, dx = k % grid.gx;
    const Array2D<T>& f = frames[k];
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) m.data(i * grid.gy + dy, j * grid.gx + dx) = f(i, j);
  }
  return m;
}

/// Exact inverse of shuffle_block; values are copied bit-identically.
template <typename T>
std::vector<Array2D<T>> unshuffle_mosaic(const MosaicT<T>& m) {
  const MosaicGrid g = m.grid;
  if (g.gy < 1 || g.gx < 1 || m.data.height() % g.gy != 0 || m.data.width() % g.gx != 0) {
    throw std::invalid_argument("unshuffle_mosaic: mosaic " + std::to_string(m.data.height()) +
                                "x" + std::to_string(m.data.width()) + " not divisible by grid " +
                                std::to_string(g.gy) + "x" + std::to_string(g.gx));
  }
  const int h = m.data.height() / g.gy, w = m.data.width() / g.gx;
  std::vector<Array2D<T>> frames(static_cast<size_t>(g.block_size()), Array2D<T>(h, w));
  for (int k = 0; k < g.block_size(); ++k) {
    const int dy = k / g.gx, dx = k % g.gx;
    Array2D<T>& f = frames[k];
    for (int i = 0; i < h; ++i)
      for (int j = 0; j < w; ++j) f(i, j) = m.data(i * g.gy + dy, j * g.gx + dx);
  }
  return frames;
}

}  // namespace turbdip
