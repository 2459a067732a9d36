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

#include "doctest.h"
#include "test_util.hpp"
#include "turbdip/pipeline.hpp"

using namespace turbdip;

namespace {

/// Small, fast configuration for end-to-end runs in unit tests.
PipelineConfig tiny_config() {
  PipelineConfig cfg;
  cfg.block_size = 5;
  cfg.stride = 5;
  cfg.gen.scales = 2;
  cfg.gen.channels = 8;
  cfg.gen.skip_channels = 2;
  cfg.gen.latent_channels = 4;
  cfg.opt.max_epoch = 60;
  cfg.es.window = 10;
  cfg.es.patience_start = 15;
  cfg.es.patience = 15;
  return cfg;
}

FrameSequence constant_sequence(int n, int h, int w, float v) {
  FrameSequence s;
  for (int i = 0; i < n; ++i) s.frames.push_back(Frame{Array2D<float>(h, w, v), std::nullopt});
  return s;
}

std::vector<int> starts_of(const BlockSchedule& s) {
  std::vector<int> out;
  for (const auto& b : s) out.push_back(b.start);
  return out;
}

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("schedule worked examples") {
  // Clamped tail: the final block refits 7..11 but only emits 10, 11.
  const BlockSchedule a = schedule_blocks(12, 5, 5);
  CHECK(starts_of(a) == std::vector<int>{0, 5, 7});
  CHECK(a[0].emit_lo == 0);
  CHECK(a[0].emit_hi == 5);
  CHECK(a[1].emit_lo == 5);
  CHECK(a[1].emit_hi == 10);
  CHECK(a[2].emit_lo == 10);
  CHECK(a[2].emit_hi == 12);

  const BlockSchedule b = schedule_blocks(5, 5, 5);
  REQUIRE(b.size() == 1);
  CHECK(b[0].start == 0);
  CHECK(b[0].emit_lo == 0);
  CHECK(b[0].emit_hi == 5);

  const BlockSchedule c = schedule_blocks(7, 5, 1);
  CHECK(starts_of(c) == std::vector<int>{0, 1, 2});
  CHECK(c[0].emit_hi == 5);
  CHECK(c[1].emit_lo == 5);
  CHECK(c[1].emit_hi == 6);
  CHECK(c[2].emit_lo == 6);
  CHECK(c[2].emit_hi == 7);

  CHECK_THROWS_AS(schedule_blocks(3, 5, 5), std::invalid_argument);
  CHECK_THROWS_AS(schedule_blocks(10, 5, 6), std::invalid_argument);
}

TEST_CASE("schedules partition the frame range") {
  Rng rng(15);
  for (int rep = 0; rep < 100; ++rep) {
    const int t = 1 + static_cast<int>(rng.next_u64() % 8);
    const int n = t + static_cast<int>(rng.next_u64() % 30);
    const int s = 1 + static_cast<int>(rng.next_u64() % t);
    const BlockSchedule sched = schedule_blocks(n, t, s);
    int expected_next = 0;
    for (const auto& b : sched) {
      CHECK(b.start >= 0);
      CHECK(b.start + t <= n);
      CHECK(b.emit_lo == expected_next);
      CHECK(b.emit_lo >= b.start);
      CHECK(b.emit_hi == b.start + t);
      expected_next = b.emit_hi;
    }
    CHECK(expected_next == n);
    CHECK(sched.back().start == n - t);
  }
}

TEST_CASE("non-overlapping stride emits exactly the spans") {
  const BlockSchedule s = schedule_blocks(15, 5, 5);
  REQUIRE(s.size() == 3);
  for (int k = 0; k < 3; ++k) {
    CHECK(s[k].start == 5 * k);
    CHECK(s[k].emit_lo == s[k].start);
    CHECK(s[k].emit_hi == s[k].start + 5);
  }
}

TEST_CASE("padding reaches the next multiple and inverts exactly") {
  Rng rng(31);
  Array2D<float> m(10, 10);
  for (size_t i = 0; i < m.size(); ++i) m.data()[i] = static_cast<float>(rng.uniform01());

  const auto [padded, rec] = pad_for_scales(m, 3);
  CHECK(padded.height() == 16);
  CHECK(padded.width() == 16);
  CHECK(rec.orig_h == 10);
  CHECK(rec.orig_w == 10);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 10; ++x) CHECK(padded(y, x) == m(y, x));
  // Mirrored border: row 10 reflects row 9, row 11 reflects row 8.
  CHECK(padded(10, 3) == m(9, 3));
  CHECK(padded(11, 3) == m(8, 3));
  CHECK(padded(4, 10) == m(4, 9));
  CHECK(crop_to(padded, rec) == m);

  const auto [exact, rec2] = pad_for_scales(m, 1);
  CHECK(exact == m);  // 10 already divides by 2

  const auto [tiny, rec3] = pad_for_scales(Array2D<float>(1, 1, 0.7f), 3);
  CHECK(tiny.height() == 8);
  CHECK(tiny.width() == 8);
  for (size_t i = 0; i < tiny.size(); ++i) CHECK(tiny.data()[i] == 0.7f);
}

TEST_CASE("constant sequence restores to the constant") {
  const float value = 0.5f;
  const FrameSequence seq = constant_sequence(10, 16, 16, value);
  PipelineConfig cfg = tiny_config();
  RunReport report;
  const FrameSequence out = run(seq, cfg, &report);

  REQUIRE(out.size() == 10);
  CHECK(out.height() == 16);
  CHECK(out.width() == 16);
  for (const Frame& f : out.frames)
    for (size_t i = 0; i < f.luma.size(); ++i)
      CHECK(std::abs(f.luma.data()[i] - value) < 0.05f);
  CHECK(report.blocks.size() == 2);
}

TEST_CASE("single block covers an exact-fit sequence") {
  const FrameSequence seq = constant_sequence(5, 16, 16, 0.3f);
  PipelineConfig cfg = tiny_config();
  cfg.opt.max_epoch = 20;
  RunReport report;
  const FrameSequence out = run(seq, cfg, &report);
  CHECK(out.size() == 5);
  CHECK(report.blocks.size() == 1);
  CHECK(report.blocks[0].init == InitKind::FreshRandom);
}

TEST_CASE("warm start chain: fresh, fresh, predicted...") {
  const FrameSequence seq = constant_sequence(20, 16, 16, 0.4f);
  PipelineConfig cfg = tiny_config();
  cfg.opt.max_epoch = 25;
  RunReport report;
  run(seq, cfg, &report);
  REQUIRE(report.blocks.size() == 4);
  CHECK(report.blocks[0].init == InitKind::FreshRandom);
  CHECK(report.blocks[1].init == InitKind::FreshRandom);
  CHECK(report.blocks[2].init == InitKind::Predicted);
  CHECK(report.blocks[3].init == InitKind::Predicted);

  cfg.warm_copy_block1 = true;
  RunReport report2;
  run(seq, cfg, &report2);
  CHECK(report2.blocks[1].init == InitKind::Copy);
}

TEST_CASE("every output frame is written once, also with overlap") {
  FrameSequence seq = constant_sequence(7, 16, 16, 0.0f);
  for (int t = 0; t < 7; ++t)
    for (size_t i = 0; i < seq.frames[t].luma.size(); ++i)
      seq.frames[t].luma.data()[i] = 0.2f + 0.1f * t / 7.0f;
  PipelineConfig cfg = tiny_config();
  cfg.stride = 1;
  cfg.opt.max_epoch = 15;
  RunReport report;
  const FrameSequence out = run(seq, cfg, &report);
  REQUIRE(out.size() == 7);
  for (const Frame& f : out.frames) {
    CHECK(f.luma.height() == 16);
    CHECK(f.luma.width() == 16);
  }
  CHECK(report.blocks.size() == 3);
}

TEST_CASE("identical seeds give identical runs") {
  FrameSequence seq = constant_sequence(5, 16, 16, 0.0f);
  Rng rng(77);
  for (Frame& f : seq.frames)
    for (size_t i = 0; i < f.luma.size(); ++i) f.luma.data()[i] = static_cast<float>(rng.uniform01());
  PipelineConfig cfg = tiny_config();
  cfg.opt.max_epoch = 30;
  cfg.seed = 5;

  RunReport r1, r2;
  const FrameSequence a = run(seq, cfg, &r1);
  const FrameSequence b = run(seq, cfg, &r2);
  for (int t = 0; t < 5; ++t) CHECK(a.frames[t].luma == b.frames[t].luma);
  CHECK(r1.to_text() == r2.to_text());

  cfg.seed = 6;
  RunReport r3;
  const FrameSequence c = run(seq, cfg, &r3);
  CHECK(a.frames[0].luma != c.frames[0].luma);
}

TEST_CASE("report text carries the schedule and config echo") {
  const FrameSequence seq = constant_sequence(5, 16, 16, 0.6f);
  PipelineConfig cfg = tiny_config();
  cfg.opt.max_epoch = 12;
  RunReport report;
  run(seq, cfg, &report);
  const std::string text = report.to_text();
  CHECK(text.find("run.n_frames 5") != std::string::npos);
  CHECK(text.find("run.grid 5x1") != std::string::npos);
  CHECK(text.find("block.0.init fresh") != std::string::npos);
  CHECK(text.find("wall") == std::string::npos);  // timings live in the sidecar
  CHECK(report.timing_text().find("wall_seconds") != std::string::npos);
}

TEST_CASE("too-short sequences and bad configs are rejected") {
  const FrameSequence seq = constant_sequence(3, 16, 16, 0.5f);
  PipelineConfig cfg = tiny_config();
  CHECK_THROWS_AS(run(seq, cfg), IoError);

  PipelineConfig bad = tiny_config();
  bad.grid = MosaicGrid{2, 2};  // block_size 5
  CHECK_THROWS_AS(run(constant_sequence(5, 16, 16, 0.5f), bad), std::invalid_argument);
}

}  // TEST_SUITE
