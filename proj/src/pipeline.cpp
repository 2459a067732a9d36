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

#include "turbdip/pipeline.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace turbdip {
namespace {

int mirror(int i, int n) {
  if (n == 1) return 0;
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

int next_multiple(int v, int m) { return ((v + m - 1) / m) * m; }

void write_trace_csv(const std::string& dir, int block_index, const BlockReport& b) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ostringstream name;
  name << dir << "/block_" << block_index << "_trace.csv";
  std::ofstream out(name.str());
  out << "iter,loss,raw_var,smooth_var\n";
  out.precision(9);
  for (size_t i = 0; i < b.loss_trace.size(); ++i) {
    out << (i + 1) << "," << b.loss_trace[i] << "," << b.raw_var_trace[i] << ","
        << b.smooth_var_trace[i] << "\n";
  }
}

}  // namespace

void PipelineConfig::validate(int n_frames) const {
  gen.validate();
  opt.validate();
  es.validate();
  if (block_size < 1) throw std::invalid_argument("PipelineConfig: block_size must be >= 1");
  if (stride < 1 || stride > block_size)
    throw std::invalid_argument("PipelineConfig: stride must satisfy 1 <= stride <= block_size");
  // Classified as an input-data error (exit code 2 in the CLI), unlike the
  // flag-validation failures above.
  if (n_frames < block_size)
    throw IoError("sequence shorter than block: " + std::to_string(n_frames) +
                  " frames < block_size " + std::to_string(block_size));
  if (grid && grid->block_size() != block_size)
    throw std::invalid_argument("PipelineConfig: grid does not factor block_size");
}

BlockSchedule schedule_blocks(int n_frames, int block_size, int stride) {
  if (n_frames < block_size)
    throw std::invalid_argument("schedule_blocks: n_frames " + std::to_string(n_frames) +
                                " < block_size " + std::to_string(block_size));
  if (stride < 1 || stride > block_size)
    throw std::invalid_argument("schedule_blocks: stride must satisfy 1 <= stride <= block_size");
  BlockSchedule out;
  const int last_start = n_frames - block_size;
  int emitted = 0;
  for (int s = 0;; s += stride) {
    const int start = std::min(s, last_start);
    ScheduledBlock b;
    b.start = start;
    b.emit_lo = std::max(start, emitted);
    b.emit_hi = start + block_size;
    emitted = b.emit_hi;
    out.push_back(b);
    if (start == last_start) break;
  }
  return out;
}

std::pair<Array2D<float>, CropRecord> pad_for_scales(const Array2D<float>& m, int scales) {
  const int mult = 1 << scales;
  const int h = m.height(), w = m.width();
  const int ph = next_multiple(h, mult), pw = next_multiple(w, mult);
  CropRecord rec{h, w};
  if (ph == h && pw == w) return {m, rec};
  Array2D<float> padded(ph, pw);
  for (int y = 0; y < ph; ++y)
    for (int x = 0; x < pw; ++x) padded(y, x) = m(mirror(y, h), mirror(x, w));
  return {std::move(padded), rec};
}

Array2D<float> crop_to(const Array2D<float>& padded, const CropRecord& rec) {
  if (padded.height() == rec.orig_h && padded.width() == rec.orig_w) return padded;
  Array2D<float> out(rec.orig_h, rec.orig_w);
  for (int y = 0; y < rec.orig_h; ++y)
    for (int x = 0; x < rec.orig_w; ++x) out(y, x) = padded(y, x);
  return out;
}

FrameSequence run(const FrameSequence& seq, const PipelineConfig& cfg, RunReport* report) {
  seq.validate();
  cfg.validate(seq.size());
  const MosaicGrid grid = cfg.grid ? *cfg.grid : grid_for_block_size(cfg.block_size);
  const BlockSchedule schedule = schedule_blocks(seq.size(), cfg.block_size, cfg.stride);
  const uint64_t generator_seed = derive_seed(cfg.seed, seed_stream::kGeneratorWeights, 0);

  if (report) {
    report->n_frames = seq.size();
    report->height = seq.height();
    report->width = seq.width();
    report->config = cfg;
    report->grid = grid;
    report->blocks.clear();
  }

  std::vector<Array2D<float>> restored(seq.size());
  ParamHistory<float> history;

  for (size_t k = 0; k < schedule.size(); ++k) {
    const ScheduledBlock& blk = schedule[k];
    std::vector<Array2D<float>> planes;
    planes.reserve(cfg.block_size);
    for (int f = blk.start; f < blk.start + cfg.block_size; ++f)
      planes.push_back(seq.frames[f].luma);
    Mosaic mosaic = shuffle_block(planes, grid);
    auto [target, crop] = pad_for_scales(mosaic.data, cfg.gen.scales);

    InitSpec<float> init = predict_init(history);
    if (k == 1 && !cfg.warm_copy_block1) init = InitSpec<float>{InitKind::FreshRandom, {}};

    BlockFitResult<float> fit;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fit = fit_block<float>(
          init.kind == InitKind::FreshRandom ? std::nullopt
                                             : std::make_optional(std::move(init.params)),
          target, cfg.gen, cfg.opt, cfg.es, generator_seed,
          derive_seed(cfg.seed, seed_stream::kBlockInit, k));
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " (block " + std::to_string(k) + ")");
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Mosaic restored_mosaic;
    restored_mosaic.data = crop_to(fit.restored_mosaic, crop);
    restored_mosaic.grid = grid;
    restored_mosaic.block_frames = cfg.block_size;
    restored_mosaic.frame_height = seq.height();
    restored_mosaic.frame_width = seq.width();
    std::vector<Array2D<float>> block_frames = unshuffle_mosaic(restored_mosaic);
    for (int f = blk.emit_lo; f < blk.emit_hi; ++f)
      restored[f] = std::move(block_frames[f - blk.start]);

    history.push(static_cast<int>(k), std::move(fit.final_params));

    BlockReport br;
    br.index = static_cast<int>(k);
    br.start = blk.start;
    br.emit_lo = blk.emit_lo;
    br.emit_hi = blk.emit_hi;
    br.init = init.kind;
    br.stop_iter = fit.stop_iter;
    br.best_iter = fit.best_iter;
    br.final_loss = fit.loss_trace.empty() ? 0.0 : fit.loss_trace.back();
    br.best_smooth_var =
        (fit.best_iter >= 1 && fit.best_iter <= static_cast<int>(fit.smooth_var_trace.size()))
            ? fit.smooth_var_trace[fit.best_iter - 1]
            : 0.0;
    br.wall_seconds = wall;
    br.loss_trace = std::move(fit.loss_trace);
    br.raw_var_trace = std::move(fit.raw_var_trace);
    br.smooth_var_trace = std::move(fit.smooth_var_trace);
    if (!cfg.trace_dir.empty()) write_trace_csv(cfg.trace_dir, br.index, br);
    if (cfg.on_block) cfg.on_block(br, static_cast<int>(schedule.size()));
    if (report) report->blocks.push_back(std::move(br));
  }

  FrameSequence out;
  out.frame_rate = seq.frame_rate;
  out.frames.reserve(seq.frames.size());
  for (auto& plane : restored) {
    Frame f;
    f.luma = std::move(plane);
    out.frames.push_back(std::move(f));
  }
  return out;
}

std::string RunReport::to_text() const {
  std::ostringstream os;
  os.precision(9);
  os << "turbdip.report.version 1\n";
  os << "run.n_frames " << n_frames << "\n";
  os << "run.height " << height << "\n";
  os << "run.width " << width << "\n";
  os << "run.block_size " << config.block_size << "\n";
  os << "run.stride " << config.stride << "\n";
  os << "run.grid " << grid.gy << "x" << grid.gx << "\n";
  os << "run.seed " << config.seed << "\n";
  os << "run.warm_copy_block1 " << (config.warm_copy_block1 ? 1 : 0) << "\n";
  os << "gen.scales " << config.gen.scales << "\n";
  os << "gen.channels " << config.gen.channels << "\n";
  os << "gen.skip_channels " << config.gen.skip_channels << "\n";
  os << "gen.kernel " << config.gen.kernel << "\n";
  os << "gen.latent_channels " << config.gen.latent_channels << "\n";
  os << "opt.lambda " << config.opt.lambda << "\n";
  os << "opt.max_epoch " << config.opt.max_epoch << "\n";
  os << "opt.learning_rate " << config.opt.learning_rate << "\n";
  os << "es.patience " << config.es.patience << "\n";
  os << "es.patience_start " << config.es.patience_start << "\n";
  os << "es.alpha " << config.es.alpha << "\n";
  os << "es.window " << config.es.window << "\n";
  os << "run.n_blocks " << blocks.size() << "\n";
  for (const BlockReport& b : blocks) {
    const std::string p = "block." + std::to_string(b.index) + ".";
    os << p << "start " << b.start << "\n";
    os << p << "emit " << b.emit_lo << ".." << b.emit_hi - 1 << "\n";
    os << p << "init " << init_kind_name(b.init) << "\n";
    os << p << "stop_iter " << b.stop_iter << "\n";
    os << p << "best_iter " << b.best_iter << "\n";
    os << p << "final_loss " << b.final_loss << "\n";
    os << p << "best_smooth_var " << b.best_smooth_var << "\n";
  }
  return os.str();
}

std::string RunReport::timing_text() const {
  std::ostringstream os;
  os.precision(4);
  double total = 0.0;
  for (const BlockReport& b : blocks) {
    os << "block." << b.index << ".wall_seconds " << b.wall_seconds << "\n";
    total += b.wall_seconds;
  }
  os << "total.wall_seconds " << total << "\n";
  return os.str();
}

}  // namespace turbdip
