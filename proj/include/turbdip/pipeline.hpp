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

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "turbdip/image.hpp"
#include "turbdip/mosaic.hpp"
#include "turbdip/optimize.hpp"
#include "turbdip/warmstart.hpp"

// End-to-end restoration: slide a window of block_size frames over the
// sequence, interlace each block into a mosaic, fit the generator (warm
// started from previous blocks), and scatter the restored frames back.

namespace turbdip {

struct BlockReport;

struct PipelineConfig {
  int block_size = 5;
  int stride = 5;
  std::optional<MosaicGrid> grid;  // defaults to grid_for_block_size(block_size)
  HourglassConfig gen;
  OptimizerConfig opt;
  EsConfig es;
  uint64_t seed = 0;
  bool warm_copy_block1 = false;  // copy block 0's result instead of a second fresh draw
  std::string trace_dir;          // per-block CSV traces when non-empty
  std::function<void(const BlockReport&, int n_blocks)> on_block;  // progress hook

  void validate(int n_frames) const;
};

struct ScheduledBlock {
  int start = 0;     // first frame of the fitted window
  int emit_lo = 0;   // frames [emit_lo, emit_hi) written from this block
  int emit_hi = 0;
};

using BlockSchedule = std::vector<ScheduledBlock>;

/// Window starts at 0, stride, 2*stride, ... with the last start clamped to
/// n_frames - block_size; each block emits only the frames no earlier block
/// produced. The emit ranges partition [0, n_frames) exactly.
BlockSchedule schedule_blocks(int n_frames, int block_size, int stride);

struct CropRecord {
  int orig_h = 0, orig_w = 0;
};

/// Mirror-pads (edge-inclusive reflection) right/bottom to the next multiple
/// of 2^scales. The crop record inverts the padding exactly.
std::pair<Array2D<float>, CropRecord> pad_for_scales(const Array2D<float>& m, int scales);

Array2D<float> crop_to(const Array2D<float>& padded, const CropRecord& rec);

struct BlockReport {
  int index = 0;
  int start = 0, emit_lo = 0, emit_hi = 0;
  InitKind init = InitKind::FreshRandom;
  int stop_iter = 0, best_iter = 0;
  double final_loss = 0.0;
  double best_smooth_var = 0.0;
  double wall_seconds = 0.0;  // kept out of the deterministic report file
  std::vector<double> loss_trace, raw_var_trace, smooth_var_trace;
};

struct RunReport {
  int n_frames = 0, height = 0, width = 0;
  PipelineConfig config;
  MosaicGrid grid;
  std::vector<BlockReport> blocks;

  /// Deterministic key/value serialization (no timings, no traces).
  std::string to_text() const;
  /// Wall-clock section, one line per block.
  std::string timing_text() const;
};

FrameSequence run(const FrameSequence& seq, const PipelineConfig& cfg, RunReport* report = nullptr);

}  // namespace turbdip
