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

#include "turbdip/image.hpp"

// Sequence I/O. 8-bit PNG and binary PGM (P5) frames; anything else is
// rejected with the offending filename. Color inputs are split into BT.601
// luma plus Cb/Cr planes on load; processing touches luma only and the
// original chroma is re-attached for visualization.

namespace turbdip {

enum class FrameFormat { png8, pgm8 };

/// Loads every image matched by `path_pattern` (a directory, a single file,
/// or a glob with `*`/`?` in the final component), ordered by filename.
/// 8-bit values map to [0,1] via v/255.
FrameSequence load_sequence(const std::string& path_pattern);

/// Loads one mask per frame, or a single mask broadcast over the sequence.
/// Mask images must be single-channel and match the sequence dimensions;
/// values >= 128 mark background.
MaskSequence load_masks(const std::string& path, const FrameSequence& sequence);

/// Writes frame_00000.<ext>, frame_00001.<ext>, ... into out_dir, creating
/// it if needed. Values are quantized round(v*255) and clamped to [0,255].
/// Frames with chroma are written as color PNGs; pgm8 stores luma only.
void write_sequence(const FrameSequence& seq, const std::string& out_dir, FrameFormat format);

/// Output luma = restored luma; chroma copied frame-aligned from original.
FrameSequence recombine_color(const FrameSequence& restored, const FrameSequence& original);

// Single-image helpers shared by the CLI and the loaders.
Frame load_frame(const std::string& path);
void write_frame(const Frame& f, const std::string& path, FrameFormat format);

}  // namespace turbdip
