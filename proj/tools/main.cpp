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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "turbdip/metrics.hpp"
#include "turbdip/pipeline.hpp"
#include "turbdip/seqio.hpp"
#include "turbdip/turbsim.hpp"

namespace fs = std::filesystem;
using namespace turbdip;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitNumeric = 3;

MosaicGrid parse_grid(const std::string& s) {
  const size_t x = s.find('x');
  if (x == std::string::npos) throw CLI::ValidationError("--grid", "expected GYxGX, e.g. 5x1");
  try {
    MosaicGrid g{std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    if (g.gy < 1 || g.gx < 1) throw std::invalid_argument("");
    return g;
  } catch (const std::exception&) {
    throw CLI::ValidationError("--grid", "expected GYxGX with positive factors");
  }
}

// Config files are plain `key value` or `key = value` lines ('#' comments),
// where the key is a long option name without the dashes. They are expanded
// into --key=value tokens inserted before the explicit flags, which
// therefore override the file.
std::vector<std::string> config_file_args(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    const size_t comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    size_t sep = line.find_first_of("= \t");
    if (sep == std::string::npos)
      throw IoError("malformed config line (expected key value): " + line);
    const std::string key = line.substr(0, sep);
    sep = line.find_first_not_of("= \t", sep);
    if (sep == std::string::npos) throw IoError("config key without value: " + key);
    out.push_back("--" + key + "=" + line.substr(sep));
  }
  return out;
}

/// Expands `--config FILE` in place; later (explicit) occurrences of an
/// option win via the TakeLast policy set on every option.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  std::string path;
  size_t at = args.size();
  for (size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[i + 1];
      at = i;
      args.erase(args.begin() + i, args.begin() + i + 2);
      break;
    }
    if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
      at = i;
      args.erase(args.begin() + i);
      break;
    }
  }
  if (!path.empty()) {
    // The file's options are spliced in right after the subcommand name,
    // so every explicit flag lands later and wins under TakeLast.
    size_t insert_at = at;
    for (size_t i = 0; i < args.size(); ++i) {
      if (!args[i].empty() && args[i][0] != '-') {
        insert_at = i + 1;
        break;
      }
    }
    const std::vector<std::string> extra = config_file_args(path);
    args.insert(args.begin() + insert_at, extra.begin(), extra.end());
  }
  return args;
}

void take_last_everywhere(CLI::App* cmd) {
  for (CLI::Option* opt : cmd->get_options()) opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
}

struct RestoreOptions {
  std::string input, output, grid, format = "png";
  PipelineConfig pipe;
  bool trace = false;
};

void add_fit_options(CLI::App* cmd, RestoreOptions& o) {
  cmd->add_option("--block-size", o.pipe.block_size, "Frames per temporal block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--stride", o.pipe.stride,
                  "Window stride in frames (defaults to the block size)")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--grid", o.grid, "Mosaic interlace factors GYxGX (default: most-square)");
  cmd->add_option("--max-epoch", o.pipe.opt.max_epoch, "Iteration cap per block")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--patience", o.pipe.es.patience,
                  "Iterations without a variance minimum before stopping")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--patience-start", o.pipe.es.patience_start,
                  "Iteration at which minimum tracking begins")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--alpha", o.pipe.es.alpha, "EMA coefficient for the variance curve")
      ->check(CLI::Range(1e-9, 1.0))
      ->capture_default_str();
  cmd->add_option("--lambda", o.pipe.opt.lambda, "Total-variation weight")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--lr", o.pipe.opt.learning_rate, "Adam learning rate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--es-window", o.pipe.es.window, "Output ring length for the moving variance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--seed", o.pipe.seed, "Master seed; all randomness derives from it")
      ->capture_default_str();
  cmd->add_option("--scales", o.pipe.gen.scales, "Hourglass depth")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--channels", o.pipe.gen.channels, "Feature channels per scale")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_option("--skip-channels", o.pipe.gen.skip_channels, "Skip connection width")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd->add_option("--latent-channels", o.pipe.gen.latent_channels, "Latent input channels")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd->add_flag("--warm-copy-block1", o.pipe.warm_copy_block1,
                "Initialize block 1 from block 0's parameters instead of a fresh draw");
  cmd->add_flag("--trace", o.trace, "Write per-block iteration traces (CSV) next to the output");
}

int cmd_restore(RestoreOptions& o, bool stride_given) {
  if (!stride_given) o.pipe.stride = o.pipe.block_size;
  if (!o.grid.empty()) o.pipe.grid = parse_grid(o.grid);
  if (o.trace) o.pipe.trace_dir = (fs::path(o.output) / "traces").string();

  FrameSequence seq = load_sequence(o.input);
  std::cerr << "loaded " << seq.size() << " frames (" << seq.width() << "x" << seq.height()
            << (seq.has_chroma() ? ", color" : ", gray") << ")\n";
  o.pipe.on_block = [](const BlockReport& b, int total) {
    std::cerr << "block " << b.index + 1 << "/" << total << ": init=" << init_kind_name(b.init)
              << " stop_iter=" << b.stop_iter << " best_iter=" << b.best_iter
              << " final_loss=" << b.final_loss << " (" << b.wall_seconds << "s)\n";
  };

  RunReport report;
  FrameSequence restored = run(seq, o.pipe, &report);
  if (seq.has_chroma()) restored = recombine_color(restored, seq);

  write_sequence(restored, o.output,
                 o.format == "pgm" ? FrameFormat::pgm8 : FrameFormat::png8);
  {
    std::ofstream rep(fs::path(o.output) / "report.txt");
    rep << report.to_text();
  }
  {
    std::ofstream tim(fs::path(o.output) / "report_timing.txt");
    tim << report.timing_text();
  }
  std::cerr << "wrote " << restored.size() << " frames to " << o.output << "\n";
  return 0;
}

int cmd_metrics(const std::string& input, const std::string& masks, const std::string& reference,
                const std::string& out_file) {
  FrameSequence seq = load_sequence(input);
  MetricsReport rep;
  if (!masks.empty()) {
    MaskSequence ms = load_masks(masks, seq);
    int n_px = 0;
    rep.background_var = background_variance(seq, ms, &n_px);
    rep.n_background_pixels = n_px;
  }
  if (!reference.empty()) {
    FrameSequence ref = load_sequence(reference);
    if (ref.size() != seq.size())
      throw IoError("reference length " + std::to_string(ref.size()) +
                    " does not match input length " + std::to_string(seq.size()));
    std::vector<double> ps;
    double psum = 0.0, ssum = 0.0;
    for (int i = 0; i < seq.size(); ++i) {
      ps.push_back(psnr(seq.frames[i], ref.frames[i]));
      psum += ps.back();
      ssum += ssim(seq.frames[i], ref.frames[i]);
    }
    rep.per_frame_psnr = ps;
    rep.mean_psnr = psum / seq.size();
    rep.mean_ssim = ssum / seq.size();
  }

  std::printf("metric               value\n");
  std::printf("-------------------  ----------\n");
  if (rep.background_var)
    std::printf("%-19s  %.4f\n", "background_var", *rep.background_var);
  if (rep.background_var)
    std::printf("%-19s  %d\n", "background_pixels", rep.n_background_pixels);
  if (rep.mean_psnr) std::printf("%-19s  %.4f\n", "mean_psnr_db", *rep.mean_psnr);
  if (rep.mean_ssim) std::printf("%-19s  %.4f\n", "mean_ssim", *rep.mean_ssim);
  if (!rep.background_var && !rep.mean_psnr)
    std::printf("(nothing to compute: pass --masks and/or --reference)\n");

  if (!out_file.empty()) {
    std::ofstream out(out_file);
    if (!out) throw IoError("cannot write metrics report: " + out_file);
    out << rep.to_text();
  }
  return 0;
}

struct SimulateOptions {
  std::string input, output;
  int frames = 20;
  uint64_t seed = 0;
  TurbulenceParams params;
};

int cmd_simulate(const SimulateOptions& o) {
  FrameSequence clean = load_sequence(o.input);
  auto [distorted, clean_out] = synthesize_sequence(clean, o.frames, o.params, o.seed);
  write_sequence(distorted, (fs::path(o.output) / "distorted").string(), FrameFormat::png8);
  write_sequence(clean_out, (fs::path(o.output) / "clean").string(), FrameFormat::png8);
  std::ofstream rec(fs::path(o.output) / "params.txt");
  rec.precision(9);
  rec << "turbdip.simulate.version 1\n"
      << "frames " << o.frames << "\n"
      << "seed " << o.seed << "\n"
      << "tilt_strength " << o.params.tilt_strength << "\n"
      << "tilt_smoothness " << o.params.tilt_smoothness << "\n"
      << "blur_sigma " << o.params.blur_sigma << "\n"
      << "noise_sigma " << o.params.noise_sigma << "\n"
      << "temporal_correlation " << o.params.temporal_correlation << "\n";
  std::cerr << "wrote " << o.frames << " distorted+clean frame pairs to " << o.output << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// selftest: fast numerical health checks, one pass/fail line each.

bool check(const char* name, bool ok) {
  std::printf("[%s] %s\n", ok ? "ok" : "FAIL", name);
  return ok;
}

int cmd_selftest() {
  bool all = true;

  {
    Rng rng(7);
    bool ok = true;
    for (int rep = 0; rep < 25 && ok; ++rep) {
      const int t = 1 + static_cast<int>(rng.next_u64() % 9);
      const int h = 1 + static_cast<int>(rng.next_u64() % 12);
      const int w = 1 + static_cast<int>(rng.next_u64() % 12);
      std::vector<Array2D<float>> frames(t, Array2D<float>(h, w));
      for (auto& f : frames)
        for (size_t i = 0; i < f.size(); ++i) f.data()[i] = static_cast<float>(rng.uniform01());
      const auto back = unshuffle_mosaic(shuffle_block(frames, grid_for_block_size(t)));
      for (int k = 0; k < t; ++k) ok = ok && back[k] == frames[k];
    }
    all &= check("mosaic shuffle/unshuffle roundtrip", ok);
  }
  {
    Array2D<double> x(2, 2);
    x(0, 0) = 0;
    x(0, 1) = 1;
    x(1, 0) = 2;
    x(1, 1) = 3;
    all &= check("total variation oracle", tv(x) == 6.0 && tv(Array2D<double>(3, 3, 0.5)) == 0.0);
  }
  {
    OptimizerConfig cfg;
    ParamVector<double> p{0.0};
    AdamState<double> st;
    adam_step<double>(p, {1.0}, st, cfg);
    all &= check("adam first-step magnitude",
                 std::abs(p[0] + cfg.learning_rate) < 1e-6);
  }
  {
    EsConfig cfg;
    EsState<double> es;
    int stop_iter = -1;
    for (int t = 1; t <= 400; ++t) {
      const double v = static_cast<double>(t - 100) * (t - 100);
      if (es_track<double>(es, v, t, cfg, nullptr, nullptr) == EsDecision::Stop) {
        stop_iter = t;
        break;
      }
    }
    all &= check("early-stop rule simulation", stop_iter == 150 && es.best_iter == 100);
  }
  {
    HourglassConfig cfg;
    cfg.scales = 1;
    cfg.channels = 8;
    cfg.skip_channels = 2;
    cfg.latent_channels = 4;
    GeneratorState<double> st = init_generator<double>(cfg, 16, 16, 11);
    Array2D<double> target(16, 16);
    Rng rng(13);
    for (size_t i = 0; i < target.size(); ++i) target.data()[i] = rng.uniform01();
    const double lambda = 0.1;
    EvalResult<double> ev = loss_and_gradients(st, target, lambda);
    ParamVector<double> p = get_params(st);
    set_params(st, p);
    const double l0 = loss_and_gradients(st, target, lambda).loss;
    bool ok = true;
    const double step = 1e-4;
    int accepted = 0;
    for (int probe = 0; probe < 200 && accepted < 24 && ok; ++probe) {
      const size_t i = rng.next_u64() % p.size();
      ParamVector<double> pp = p;
      pp[i] += step;
      set_params(st, pp);
      const double lp = loss_and_gradients(st, target, lambda).loss;
      pp[i] -= 2 * step;
      set_params(st, pp);
      const double lm = loss_and_gradients(st, target, lambda).loss;
      const double fd = (lp - lm) / (2 * step);
      // Skip intervals containing a kink of the piecewise-smooth loss.
      if (std::abs((lp - l0) / step - (l0 - lm) / step) >
          1e-3 * std::max(1.0, std::abs(fd)))
        continue;
      ++accepted;
      const double err = std::abs(fd - ev.grad[i]) /
                         std::max({std::abs(fd), std::abs(ev.grad[i]), 1e-8});
      ok = err < 1e-4;
    }
    all &= check("analytic gradients vs finite differences", ok && accepted >= 24);
  }

  return all ? 0 : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"turbdip: self-supervised restoration of turbulence-distorted image sequences"};
  app.require_subcommand(1);
  app.footer("Environment: TURBDIP_THREADS caps internal parallelism.");

  RestoreOptions ro;
  CLI::App* restore = app.add_subcommand("restore", "Restore an image sequence");
  restore->add_option("--input", ro.input, "Input frames: directory, file, or glob")->required();
  restore->add_option("--output", ro.output, "Output directory")->required();
  restore->add_option("--format", ro.format, "Output format: png or pgm")
      ->check(CLI::IsMember({"png", "pgm"}))
      ->capture_default_str();
  add_fit_options(restore, ro);
  restore->add_option("--config", "Key/value file with these options; flags override it");

  std::string m_input, m_masks, m_reference, m_out;
  CLI::App* metrics = app.add_subcommand("metrics", "Evaluate a sequence");
  metrics->add_option("--input", m_input, "Frames to evaluate")->required();
  metrics->add_option("--masks", m_masks, "Background mask file or directory");
  metrics->add_option("--reference", m_reference, "Ground-truth frames for PSNR/SSIM");
  metrics->add_option("--output", m_out, "Write a key/value metrics report here");
  metrics->add_option("--config", "Key/value file with these options; flags override it");

  SimulateOptions so;
  CLI::App* simulate = app.add_subcommand("simulate", "Synthesize a turbulence-distorted sequence");
  simulate->add_option("--input", so.input, "Clean frame (static scene) or frame directory")
      ->required();
  simulate->add_option("--output", so.output, "Output directory (distorted/ and clean/)")
      ->required();
  simulate->add_option("--frames", so.frames, "Frames to synthesize")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--seed", so.seed, "Master seed")->capture_default_str();
  simulate->add_option("--tilt-strength", so.params.tilt_strength, "Max warp magnitude in pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--tilt-smoothness", so.params.tilt_smoothness,
                       "Gaussian sigma of the warp fields")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  simulate->add_option("--blur-sigma", so.params.blur_sigma, "PSF width in pixels")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--noise-sigma", so.params.noise_sigma, "Additive noise level on [0,1]")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  simulate->add_option("--temporal-correlation", so.params.temporal_correlation,
                       "AR(1) coefficient between consecutive warp fields")
      ->check(CLI::Range(0.0, 0.999))
      ->capture_default_str();
  simulate->add_option("--config", "Key/value file with these options; flags override it");

  CLI::App* selftest = app.add_subcommand("selftest", "Run built-in numerical health checks");

  take_last_everywhere(restore);
  take_last_everywhere(metrics);
  take_last_everywhere(simulate);

  try {
    std::vector<std::string> args = expand_config(argc, argv);
    std::reverse(args.begin(), args.end());  // CLI11 vector parse convention
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : kExitUsage;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }

  try {
    if (restore->parsed()) return cmd_restore(ro, restore->count("--stride") > 0);
    if (metrics->parsed()) return cmd_metrics(m_input, m_masks, m_reference, m_out);
    if (simulate->parsed()) return cmd_simulate(so);
    if (selftest->parsed()) return cmd_selftest();
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return 0;
}
