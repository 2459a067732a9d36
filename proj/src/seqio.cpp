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

#include "turbdip/seqio.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>

namespace fs = std::filesystem;

namespace turbdip {
namespace {

struct RawImage {
  int width = 0, height = 0, channels = 0;  // channels: 1 (gray) or 3 (rgb)
  std::vector<uint8_t> pixels;              // row-major, interleaved
};

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

// ---------------------------------------------------------------------------
// PNG

// libpng reports errors via longjmp. Every piece of C++ state touched
// inside the jump region lives on the heap behind a pointer that is fixed
// before setjmp, so nothing is clobbered and destructors still run when we
// rethrow as IoError.
struct PngCtx {
  RawImage img;
  std::vector<png_bytep> rows;
  std::string message;
};

RawImage read_png(const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "rb"));
  if (!fp) throw IoError("cannot open file: " + path);

  unsigned char sig[8];
  if (std::fread(sig, 1, 8, fp.get()) != 8 || png_sig_cmp(sig, 0, 8))
    throw IoError("not a PNG file: " + path);

  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError("libpng init failed for: " + path);
  }

  const auto ctx = std::make_unique<PngCtx>();
  PngCtx* const c = ctx.get();

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw IoError(c->message.empty() ? "undecodable PNG: " + path : c->message);
  }

  png_init_io(png, fp.get());
  png_set_sig_bytes(png, 8);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth > 8) {
    c->message = "unsupported bit depth " + std::to_string(bit_depth) + " (8-bit only): " + path;
    longjmp(png_jmpbuf(png), 1);
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  png_set_strip_alpha(png);
  (void)png_set_interlace_handling(png);
  png_read_update_info(png, info);

  c->img.width = static_cast<int>(png_get_image_width(png, info));
  c->img.height = static_cast<int>(png_get_image_height(png, info));
  c->img.channels = png_get_channels(png, info);
  if (c->img.channels != 1 && c->img.channels != 3) {
    c->message = "unsupported channel count " + std::to_string(c->img.channels) + ": " + path;
    longjmp(png_jmpbuf(png), 1);
  }
  c->img.pixels.resize(static_cast<size_t>(c->img.width) * c->img.height * c->img.channels);
  c->rows.resize(c->img.height);
  for (int y = 0; y < c->img.height; ++y)
    c->rows[y] = c->img.pixels.data() + static_cast<size_t>(y) * c->img.width * c->img.channels;
  png_read_image(png, c->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return std::move(c->img);
}

void write_png(const RawImage& img, const std::string& path) {
  FilePtr fp(std::fopen(path.c_str(), "wb"));
  if (!fp) throw IoError("cannot write file: " + path);

  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    png_destroy_write_struct(&png, &info);
    throw IoError("libpng init failed for: " + path);
  }

  const auto rows = std::make_unique<std::vector<png_bytep>>(img.height);
  std::vector<png_bytep>* const r = rows.get();
  for (int y = 0; y < img.height; ++y)
    (*r)[y] = const_cast<png_bytep>(img.pixels.data() +
                                    static_cast<size_t>(y) * img.width * img.channels);

  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw IoError("PNG write failed: " + path);
  }

  png_init_io(png, fp.get());
  png_set_IHDR(png, info, img.width, img.height, 8,
               img.channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, r->data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

// ---------------------------------------------------------------------------
// PGM (binary P5)

int pgm_next_int(std::ifstream& in, const std::string& path) {
  // Skips whitespace and '#' comment lines between header tokens.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) throw IoError("malformed PGM header: " + path);
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

RawImage read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open file: " + path);
  char m0 = 0, m1 = 0;
  in.get(m0);
  in.get(m1);
  if (m0 != 'P' || m1 != '5') throw IoError("not a binary PGM (P5): " + path);
  RawImage img;
  img.width = pgm_next_int(in, path);
  img.height = pgm_next_int(in, path);
  const int maxval = pgm_next_int(in, path);
  if (maxval > 255)
    throw IoError("unsupported PGM maxval " + std::to_string(maxval) + " (8-bit only): " + path);
  if (maxval < 1 || img.width < 1 || img.height < 1)
    throw IoError("malformed PGM header: " + path);
  img.channels = 1;
  img.pixels.resize(static_cast<size_t>(img.width) * img.height);
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw IoError("truncated PGM data: " + path);
  return img;
}

void write_pgm(const RawImage& img, const std::string& path) {
  if (img.channels != 1) throw IoError("PGM stores single-channel data only: " + path);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write file: " + path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels.data()),
            static_cast<std::streamsize>(img.pixels.size()));
  if (!out) throw IoError("PGM write failed: " + path);
}

// ---------------------------------------------------------------------------

bool has_ext(const fs::path& p, const char* a, const char* b) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char c) { return std::tolower(c); });
  return e == a || e == b;
}

bool is_image_file(const fs::path& p) { return has_ext(p, ".png", ".pgm"); }

RawImage read_image(const std::string& path) {
  if (has_ext(fs::path(path), ".pgm", ".pgm")) return read_pgm(path);
  return read_png(path);
}

bool glob_match(const char* pat, const char* str) {
  // '*' and '?' wildcards, no character classes.
  while (*pat) {
    if (*pat == '*') {
      while (*pat == '*') ++pat;
      if (!*pat) return true;
      for (const char* s = str; *s; ++s)
        if (glob_match(pat, s)) return true;
      return false;
    }
    if (!*str || (*pat != '?' && *pat != *str)) return false;
    ++pat;
    ++str;
  }
  return !*str;
}

/// Expands a directory, plain file, or glob-in-final-component pattern into
/// a sorted file list.
std::vector<std::string> expand_pattern(const std::string& pattern) {
  std::vector<std::string> files;
  fs::path p(pattern);
  std::error_code ec;
  if (fs::is_directory(p, ec)) {
    for (const auto& entry : fs::directory_iterator(p)) {
      if (entry.is_regular_file() && is_image_file(entry.path()))
        files.push_back(entry.path().string());
    }
  } else if (fs::is_regular_file(p, ec)) {
    files.push_back(pattern);
  } else {
    const std::string base = p.filename().string();
    const fs::path dir = p.has_parent_path() ? p.parent_path() : fs::path(".");
    if (base.find('*') != std::string::npos || base.find('?') != std::string::npos) {
      if (fs::is_directory(dir, ec)) {
        for (const auto& entry : fs::directory_iterator(dir)) {
          if (entry.is_regular_file() &&
              glob_match(base.c_str(), entry.path().filename().string().c_str()))
            files.push_back(entry.path().string());
        }
      }
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

// BT.601 full-range luma and color-difference planes.
void split_color(const RawImage& img, Frame& frame) {
  const int h = img.height, w = img.width;
  frame.luma = Array2D<float>(h, w);
  if (img.channels == 1) {
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        frame.luma(y, x) = img.pixels[static_cast<size_t>(y) * w + x] / 255.0f;
    return;
  }
  frame.chroma.emplace();
  (*frame.chroma)[0] = Array2D<float>(h, w);
  (*frame.chroma)[1] = Array2D<float>(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const size_t i = (static_cast<size_t>(y) * w + x) * 3;
      const float r = img.pixels[i] / 255.0f;
      const float g = img.pixels[i + 1] / 255.0f;
      const float b = img.pixels[i + 2] / 255.0f;
      const float yv = 0.299f * r + 0.587f * g + 0.114f * b;
      frame.luma(y, x) = yv;
      (*frame.chroma)[0](y, x) = 0.5f + (b - yv) / 1.772f;
      (*frame.chroma)[1](y, x) = 0.5f + (r - yv) / 1.402f;
    }
  }
}

uint8_t quantize(float v) {
  const long q = std::lround(v * 255.0f);
  return static_cast<uint8_t>(std::clamp(q, 0L, 255L));
}

RawImage frame_to_raw(const Frame& f, bool want_color) {
  RawImage img;
  img.width = f.width();
  img.height = f.height();
  if (want_color && f.chroma) {
    img.channels = 3;
    img.pixels.resize(static_cast<size_t>(img.width) * img.height * 3);
    for (int y = 0; y < img.height; ++y) {
      for (int x = 0; x < img.width; ++x) {
        const float yv = f.luma(y, x);
        const float cb = (*f.chroma)[0](y, x) - 0.5f;
        const float cr = (*f.chroma)[1](y, x) - 0.5f;
        const float r = yv + 1.402f * cr;
        const float b = yv + 1.772f * cb;
        const float g = (yv - 0.299f * r - 0.114f * b) / 0.587f;
        const size_t i = (static_cast<size_t>(y) * img.width + x) * 3;
        img.pixels[i] = quantize(r);
        img.pixels[i + 1] = quantize(g);
        img.pixels[i + 2] = quantize(b);
      }
    }
  } else {
    img.channels = 1;
    img.pixels.resize(static_cast<size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x)
        img.pixels[static_cast<size_t>(y) * img.width + x] = quantize(f.luma(y, x));
  }
  return img;
}

}  // namespace

void FrameSequence::validate() const {
  if (frames.empty()) throw std::invalid_argument("FrameSequence: empty");
  const int h = frames.front().height(), w = frames.front().width();
  const bool chroma = frames.front().chroma.has_value();
  for (const Frame& f : frames) {
    if (f.height() != h || f.width() != w)
      throw std::invalid_argument("FrameSequence: mixed frame dimensions");
    if (f.chroma.has_value() != chroma)
      throw std::invalid_argument("FrameSequence: chroma present on some frames only");
  }
}

Frame load_frame(const std::string& path) {
  RawImage raw = read_image(path);
  Frame f;
  split_color(raw, f);
  return f;
}

void write_frame(const Frame& f, const std::string& path, FrameFormat format) {
  RawImage raw = frame_to_raw(f, format == FrameFormat::png8);
  if (format == FrameFormat::png8)
    write_png(raw, path);
  else
    write_pgm(raw, path);
}

FrameSequence load_sequence(const std::string& path_pattern) {
  const std::vector<std::string> files = expand_pattern(path_pattern);
  if (files.empty()) throw IoError("no files matched: " + path_pattern);
  FrameSequence seq;
  seq.frames.reserve(files.size());
  for (const std::string& f : files) {
    Frame frame = load_frame(f);
    if (!seq.frames.empty()) {
      if (frame.height() != seq.height() || frame.width() != seq.width())
        throw IoError("frame dimensions " + std::to_string(frame.width()) + "x" +
                      std::to_string(frame.height()) + " differ from sequence (" +
                      std::to_string(seq.width()) + "x" + std::to_string(seq.height()) +
                      "): " + f);
      if (frame.chroma.has_value() != seq.frames.front().chroma.has_value())
        throw IoError("mixed color/grayscale frames in sequence: " + f);
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

MaskSequence load_masks(const std::string& path, const FrameSequence& sequence) {
  const std::vector<std::string> files = expand_pattern(path);
  if (files.empty()) throw IoError("no mask files matched: " + path);
  const int n = sequence.size();
  if (static_cast<int>(files.size()) != 1 && static_cast<int>(files.size()) != n)
    throw IoError("mask count " + std::to_string(files.size()) + " is neither 1 nor sequence length " +
                  std::to_string(n) + ": " + path);
  MaskSequence out;
  out.logical_length = n;
  for (const std::string& f : files) {
    RawImage raw = read_image(f);
    if (raw.channels != 1) throw IoError("mask is not single-channel: " + f);
    if (raw.width != sequence.width() || raw.height != sequence.height())
      throw IoError("mask dimensions " + std::to_string(raw.width) + "x" +
                    std::to_string(raw.height) + " do not match sequence: " + f);
    Array2D<uint8_t> m(raw.height, raw.width);
    for (int y = 0; y < raw.height; ++y)
      for (int x = 0; x < raw.width; ++x)
        m(y, x) = raw.pixels[static_cast<size_t>(y) * raw.width + x] >= 128 ? 1 : 0;
    out.masks.push_back(std::move(m));
  }
  return out;
}

void write_sequence(const FrameSequence& seq, const std::string& out_dir, FrameFormat format) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);
  const char* ext = format == FrameFormat::png8 ? "png" : "pgm";
  for (int i = 0; i < seq.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.%s", i, ext);
    write_frame(seq.frames[i], (fs::path(out_dir) / name).string(), format);
  }
}

FrameSequence recombine_color(const FrameSequence& restored, const FrameSequence& original) {
  if (restored.size() != original.size())
    throw std::invalid_argument("recombine_color: sequence lengths differ");
  if (restored.height() != original.height() || restored.width() != original.width())
    throw std::invalid_argument("recombine_color: frame dimensions differ");
  if (!original.has_chroma())
    throw std::invalid_argument("recombine_color: original carries no chroma");
  FrameSequence out;
  out.frame_rate = original.frame_rate;
  out.frames.reserve(restored.frames.size());
  for (int i = 0; i < restored.size(); ++i) {
    Frame f;
    f.luma = restored.frames[i].luma;
    f.chroma = original.frames[i].chroma;
    out.frames.push_back(std::move(f));
  }
  return out;
}

}  // namespace turbdip
