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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "turbdip/metrics.hpp"
#include "turbdip/pipeline.hpp"
#include "turbdip/turbsim.hpp"
#include "turbdip/tv.hpp"

namespace py = pybind11;
using namespace turbdip;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

Array2D<float> to_plane(const DArray& a, int frame, int h, int w) {
  Array2D<float> out(h, w);
  const double* p = a.data() + static_cast<size_t>(frame) * h * w;
  for (size_t i = 0; i < out.size(); ++i) out.data()[i] = static_cast<float>(p[i]);
  return out;
}

FrameSequence to_sequence(const DArray& a) {
  if (a.ndim() != 3) throw std::invalid_argument("expected an (n, h, w) array");
  const int n = static_cast<int>(a.shape(0));
  const int h = static_cast<int>(a.shape(1));
  const int w = static_cast<int>(a.shape(2));
  FrameSequence seq;
  for (int t = 0; t < n; ++t) seq.frames.push_back(Frame{to_plane(a, t, h, w), std::nullopt});
  return seq;
}

py::array_t<double> from_sequence(const FrameSequence& seq) {
  const int n = seq.size(), h = seq.height(), w = seq.width();
  py::array_t<double> out({n, h, w});
  double* p = out.mutable_data();
  for (int t = 0; t < n; ++t)
    for (size_t i = 0; i < seq.frames[t].luma.size(); ++i)
      p[static_cast<size_t>(t) * h * w + i] = seq.frames[t].luma.data()[i];
  return out;
}

py::array_t<double> from_plane(const Array2D<float>& a) {
  py::array_t<double> out({a.height(), a.width()});
  for (size_t i = 0; i < a.size(); ++i) out.mutable_data()[i] = a.data()[i];
  return out;
}

py::dict report_to_dict(const RunReport& r) {
  py::dict d;
  d["n_frames"] = r.n_frames;
  d["grid"] = py::make_tuple(r.grid.gy, r.grid.gx);
  py::list blocks;
  for (const BlockReport& b : r.blocks) {
    py::dict bd;
    bd["index"] = b.index;
    bd["start"] = b.start;
    bd["emit"] = py::make_tuple(b.emit_lo, b.emit_hi);
    bd["init"] = init_kind_name(b.init);
    bd["stop_iter"] = b.stop_iter;
    bd["best_iter"] = b.best_iter;
    bd["final_loss"] = b.final_loss;
    bd["loss_trace"] = b.loss_trace;
    bd["smooth_var_trace"] = b.smooth_var_trace;
    blocks.append(bd);
  }
  d["blocks"] = blocks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Self-supervised restoration of turbulence-distorted image sequences";

  m.def("grid_for_block_size", [](int t) {
    const MosaicGrid g = grid_for_block_size(t);
    return py::make_tuple(g.gy, g.gx);
  });

  m.def(
      "shuffle",
      [](const DArray& frames, int gy, int gx) {
        if (frames.ndim() != 3) throw std::invalid_argument("expected an (n, h, w) array");
        const int t = static_cast<int>(frames.shape(0));
        const int h = static_cast<int>(frames.shape(1));
        const int w = static_cast<int>(frames.shape(2));
        MosaicGrid grid = gy > 0 ? MosaicGrid{gy, gx} : grid_for_block_size(t);
        std::vector<Array2D<double>> planes;
        for (int k = 0; k < t; ++k) {
          Array2D<double> p(h, w);
          std::copy_n(frames.data() + static_cast<size_t>(k) * h * w, p.size(), p.data());
          planes.push_back(std::move(p));
        }
        MosaicT<double> mo = shuffle_block(planes, grid);
        py::array_t<double> out({mo.data.height(), mo.data.width()});
        std::copy_n(mo.data.data(), mo.data.size(), out.mutable_data());
        return out;
      },
      py::arg("frames"), py::arg("gy") = 0, py::arg("gx") = 0,
      "Interlace a temporal block of frames into one mosaic image");

  m.def(
      "unshuffle",
      [](const DArray& mosaic, int gy, int gx) {
        if (mosaic.ndim() != 2) throw std::invalid_argument("expected an (H, W) array");
        MosaicT<double> mo;
        mo.grid = MosaicGrid{gy, gx};
        mo.data = Array2D<double>(static_cast<int>(mosaic.shape(0)),
                                  static_cast<int>(mosaic.shape(1)));
        std::copy_n(mosaic.data(), mo.data.size(), mo.data.data());
        mo.block_frames = gy * gx;
        mo.frame_height = mo.data.height() / gy;
        mo.frame_width = mo.data.width() / gx;
        const auto planes = unshuffle_mosaic(mo);
        py::array_t<double> out({static_cast<int>(planes.size()), mo.frame_height, mo.frame_width});
        for (size_t k = 0; k < planes.size(); ++k)
          std::copy_n(planes[k].data(), planes[k].size(),
                      out.mutable_data() + k * planes[k].size());
        return out;
      },
      py::arg("mosaic"), py::arg("gy"), py::arg("gx"),
      "Exact inverse of shuffle for the given grid");

  m.def(
      "tv",
      [](const DArray& x) {
        if (x.ndim() != 2) throw std::invalid_argument("expected an (H, W) array");
        Array2D<double> p(static_cast<int>(x.shape(0)), static_cast<int>(x.shape(1)));
        std::copy_n(x.data(), p.size(), p.data());
        return tv(p);
      },
      py::arg("x"), "Anisotropic total variation (sum of absolute neighbor differences)");

  m.def(
      "psnr",
      [](const DArray& a, const DArray& b) {
        if (a.ndim() != 2 || b.ndim() != 2) throw std::invalid_argument("expected (H, W) arrays");
        Frame fa{to_plane(a, 0, static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1))), {}};
        Frame fb{to_plane(b, 0, static_cast<int>(b.shape(0)), static_cast<int>(b.shape(1))), {}};
        return psnr(fa, fb);
      },
      py::arg("a"), py::arg("b"), "PSNR in dB on [0,1] images");

  m.def(
      "ssim",
      [](const DArray& a, const DArray& b) {
        if (a.ndim() != 2 || b.ndim() != 2) throw std::invalid_argument("expected (H, W) arrays");
        Frame fa{to_plane(a, 0, static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1))), {}};
        Frame fb{to_plane(b, 0, static_cast<int>(b.shape(0)), static_cast<int>(b.shape(1))), {}};
        return ssim(fa, fb);
      },
      py::arg("a"), py::arg("b"), "Structural similarity on [0,1] images");

  m.def(
      "background_variance",
      [](const DArray& frames, const py::array_t<bool, py::array::c_style | py::array::forcecast>&
                                   masks) {
        FrameSequence seq = to_sequence(frames);
        MaskSequence ms;
        ms.logical_length = seq.size();
        const int h = seq.height(), w = seq.width();
        auto add_mask = [&](const bool* p) {
          Array2D<uint8_t> m(h, w);
          for (size_t i = 0; i < m.size(); ++i) m.data()[i] = p[i] ? 1 : 0;
          ms.masks.push_back(std::move(m));
        };
        if (masks.ndim() == 2) {
          add_mask(masks.data());
        } else if (masks.ndim() == 3) {
          for (py::ssize_t t = 0; t < masks.shape(0); ++t)
            add_mask(masks.data() + static_cast<size_t>(t) * h * w);
        } else {
          throw std::invalid_argument("masks must be (h, w) or (n, h, w)");
        }
        return background_variance(seq, ms);
      },
      py::arg("frames"), py::arg("masks"),
      "Mean temporal variance (0-255 scale) of masked background pixels");

  m.def(
      "schedule_blocks",
      [](int n_frames, int block_size, int stride) {
        py::list out;
        for (const ScheduledBlock& b : schedule_blocks(n_frames, block_size, stride))
          out.append(py::make_tuple(b.start, b.emit_lo, b.emit_hi));
        return out;
      },
      py::arg("n_frames"), py::arg("block_size"), py::arg("stride"));

  m.def(
      "synthesize",
      [](const DArray& clean, int n_frames, uint64_t seed, double tilt_strength,
         double tilt_smoothness, double blur_sigma, double noise_sigma,
         double temporal_correlation) {
        if (clean.ndim() != 2) throw std::invalid_argument("expected a clean (H, W) frame");
        FrameSequence cs;
        cs.frames.push_back(Frame{
            to_plane(clean, 0, static_cast<int>(clean.shape(0)), static_cast<int>(clean.shape(1))),
            std::nullopt});
        TurbulenceParams params;
        params.tilt_strength = tilt_strength;
        params.tilt_smoothness = tilt_smoothness;
        params.blur_sigma = blur_sigma;
        params.noise_sigma = noise_sigma;
        params.temporal_correlation = temporal_correlation;
        auto [dist, cl] = synthesize_sequence(cs, n_frames, params, seed);
        return py::make_tuple(from_sequence(dist), from_sequence(cl));
      },
      py::arg("clean"), py::arg("n_frames"), py::arg("seed") = 0,
      py::arg("tilt_strength") = 2.0, py::arg("tilt_smoothness") = 4.0,
      py::arg("blur_sigma") = 0.7, py::arg("noise_sigma") = 0.02,
      py::arg("temporal_correlation") = 0.5,
      "Synthesize a turbulence-distorted sequence from a static clean frame");

  m.def(
      "restore",
      [](const DArray& frames, int block_size, int stride, uint64_t seed, int max_epoch,
         int patience, int patience_start, double alpha, double lam, double lr, int es_window,
         int scales, int channels, int skip_channels, int latent_channels,
         bool warm_copy_block1) {
        FrameSequence seq = to_sequence(frames);
        PipelineConfig cfg;
        cfg.block_size = block_size;
        cfg.stride = stride > 0 ? stride : block_size;
        cfg.seed = seed;
        cfg.opt.max_epoch = max_epoch;
        cfg.opt.lambda = lam;
        cfg.opt.learning_rate = lr;
        cfg.es.patience = patience;
        cfg.es.patience_start = patience_start;
        cfg.es.alpha = alpha;
        cfg.es.window = es_window;
        cfg.gen.scales = scales;
        cfg.gen.channels = channels;
        cfg.gen.skip_channels = skip_channels;
        cfg.gen.latent_channels = latent_channels;
        cfg.warm_copy_block1 = warm_copy_block1;
        RunReport report;
        FrameSequence restored;
        {
          py::gil_scoped_release release;
          restored = run(seq, cfg, &report);
        }
        return py::make_tuple(from_sequence(restored), report_to_dict(report));
      },
      py::arg("frames"), py::arg("block_size") = 5, py::arg("stride") = 0, py::arg("seed") = 0,
      py::arg("max_epoch") = 200, py::arg("patience") = 50, py::arg("patience_start") = 50,
      py::arg("alpha") = 0.1, py::arg("lam") = 0.1, py::arg("lr") = 0.01,
      py::arg("es_window") = 25, py::arg("scales") = 3, py::arg("channels") = 32,
      py::arg("skip_channels") = 4, py::arg("latent_channels") = 16,
      py::arg("warm_copy_block1") = false,
      "Restore an (n, h, w) sequence in [0,1]; returns (restored, report)");

  m.def(
      "gaussian_blur",
      [](const DArray& x, double sigma) {
        if (x.ndim() != 2) throw std::invalid_argument("expected an (H, W) array");
        return from_plane(gaussian_blur(
            to_plane(x, 0, static_cast<int>(x.shape(0)), static_cast<int>(x.shape(1))), sigma));
      },
      py::arg("x"), py::arg("sigma"));

  m.attr("__version__") = "0.1.0";
}
