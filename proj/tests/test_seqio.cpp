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

#include <fstream>

#include "doctest.h"
#include "test_util.hpp"
#include "turbdip/seqio.hpp"

using namespace turbdip;
using test_util::TempDir;

namespace {

FrameSequence gray_sequence(int n, int h, int w, float v) {
  FrameSequence s;
  for (int i = 0; i < n; ++i) s.frames.push_back(Frame{Array2D<float>(h, w, v), std::nullopt});
  return s;
}

Frame color_frame(int h, int w, float r, float g, float b) {
  Frame f;
  f.luma = Array2D<float>(h, w);
  f.chroma.emplace();
  (*f.chroma)[0] = Array2D<float>(h, w);
  (*f.chroma)[1] = Array2D<float>(h, w);
  const float y = 0.299f * r + 0.587f * g + 0.114f * b;
  for (int i = 0; i < h; ++i)
    for (int j = 0; j < w; ++j) {
      f.luma(i, j) = y;
      (*f.chroma)[0](i, j) = 0.5f + (b - y) / 1.772f;
      (*f.chroma)[1](i, j) = 0.5f + (r - y) / 1.402f;
    }
  return f;
}

}  // namespace

TEST_SUITE("seqio") {

TEST_CASE("constant gray frames round-trip through PNG") {
  TempDir tmp("gray");
  write_sequence(gray_sequence(5, 8, 8, 128.0f / 255.0f), tmp.str(), FrameFormat::png8);
  const FrameSequence seq = load_sequence(tmp.str());
  REQUIRE(seq.size() == 5);
  CHECK_FALSE(seq.has_chroma());
  for (const Frame& f : seq.frames) {
    REQUIRE(f.height() == 8);
    REQUIRE(f.width() == 8);
    for (size_t i = 0; i < f.luma.size(); ++i)
      CHECK(f.luma.data()[i] == doctest::Approx(128.0 / 255.0).epsilon(1e-6));
  }
}

TEST_CASE("red pixels decode to the weighted luma") {
  TempDir tmp("red");
  FrameSequence s;
  s.frames.push_back(color_frame(4, 4, 1.0f, 0.0f, 0.0f));
  write_sequence(s, tmp.str(), FrameFormat::png8);
  const FrameSequence back = load_sequence(tmp.str());
  REQUIRE(back.size() == 1);
  CHECK(back.has_chroma());
  CHECK(back.frames[0].luma(0, 0) == doctest::Approx(0.299).epsilon(1.0 / 255.0));
}

TEST_CASE("empty directory reports no files") {
  TempDir tmp("empty");
  CHECK_THROWS_WITH_AS(load_sequence(tmp.str()), doctest::Contains("no files matched"), IoError);
}

TEST_CASE("mixed dimensions name the offending file") {
  TempDir tmp("mixed");
  write_sequence(gray_sequence(1, 8, 8, 0.5f), tmp.str(), FrameFormat::png8);
  {
    FrameSequence bigger = gray_sequence(1, 9, 9, 0.5f);
    write_frame(bigger.frames[0], tmp.sub("z_last.png"), FrameFormat::png8);
  }
  CHECK_THROWS_WITH_AS(load_sequence(tmp.str()), doctest::Contains("z_last.png"), IoError);
}

TEST_CASE("undecodable files name the offending file") {
  TempDir tmp("garbage");
  std::ofstream(tmp.sub("bad.png")) << "this is not an image";
  CHECK_THROWS_WITH_AS(load_sequence(tmp.str()), doctest::Contains("bad.png"), IoError);
}

TEST_CASE("high bit depths are rejected") {
  TempDir tmp("deep");
  std::ofstream out(tmp.sub("deep.pgm"), std::ios::binary);
  out << "P5\n2 2\n65535\n";
  const char payload[8] = {0};
  out.write(payload, 8);
  out.close();
  CHECK_THROWS_WITH_AS(load_sequence(tmp.sub("deep.pgm")), doctest::Contains("8-bit"), IoError);
}

TEST_CASE("quantization endpoints and clamping") {
  TempDir tmp("quant");
  FrameSequence s = gray_sequence(1, 1, 3, 0.0f);
  s.frames[0].luma(0, 0) = 1.0f;
  s.frames[0].luma(0, 1) = 0.5f;
  s.frames[0].luma(0, 2) = -0.1f;  // post-processing overshoot
  write_sequence(s, tmp.str(), FrameFormat::pgm8);

  std::ifstream in(tmp.sub("frame_00000.pgm"), std::ios::binary);
  std::string header;
  std::getline(in, header);  // P5
  std::getline(in, header);  // dims
  std::getline(in, header);  // maxval
  unsigned char bytes[3];
  in.read(reinterpret_cast<char*>(bytes), 3);
  CHECK(bytes[0] == 255);
  CHECK(bytes[1] == 128);  // round(0.5 * 255)
  CHECK(bytes[2] == 0);    // clamped
}

TEST_CASE("gray write/load round-trips within the quantization half-step") {
  TempDir tmp("round");
  Rng rng(5);
  FrameSequence s = gray_sequence(3, 9, 7, 0.0f);
  for (Frame& f : s.frames)
    for (size_t i = 0; i < f.luma.size(); ++i) f.luma.data()[i] = static_cast<float>(rng.uniform01());
  for (FrameFormat fmt : {FrameFormat::png8, FrameFormat::pgm8}) {
    TempDir sub(fmt == FrameFormat::png8 ? "png" : "pgm");
    write_sequence(s, sub.str(), fmt);
    const FrameSequence back = load_sequence(sub.str());
    REQUIRE(back.size() == 3);
    for (int t = 0; t < 3; ++t)
      for (size_t i = 0; i < s.frames[t].luma.size(); ++i)
        CHECK(std::abs(back.frames[t].luma.data()[i] - s.frames[t].luma.data()[i]) <=
              0.5f / 255.0f + 1e-6f);
  }
}

TEST_CASE("color write/load keeps luma within the quantization half-step") {
  TempDir tmp("color");
  Rng rng(6);
  FrameSequence s;
  for (int t = 0; t < 2; ++t) {
    Frame f = color_frame(6, 6, 0, 0, 0);
    for (int y = 0; y < 6; ++y)
      for (int x = 0; x < 6; ++x) {
        f.luma(y, x) = static_cast<float>(rng.uniform(0.2, 0.8));
        (*f.chroma)[0](y, x) = static_cast<float>(rng.uniform(0.4, 0.6));
        (*f.chroma)[1](y, x) = static_cast<float>(rng.uniform(0.4, 0.6));
      }
    s.frames.push_back(std::move(f));
  }
  write_sequence(s, tmp.str(), FrameFormat::png8);
  const FrameSequence back = load_sequence(tmp.str());
  REQUIRE(back.has_chroma());
  for (int t = 0; t < 2; ++t)
    for (size_t i = 0; i < s.frames[t].luma.size(); ++i)
      CHECK(std::abs(back.frames[t].luma.data()[i] - s.frames[t].luma.data()[i]) <=
            0.5f / 255.0f + 1e-6f);
}

TEST_CASE("glob patterns select and order files") {
  TempDir tmp("glob");
  for (int i = 0; i < 4; ++i) {
    Frame f{Array2D<float>(4, 4, static_cast<float>(i) / 10.0f), std::nullopt};
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%05d.png", i);
    write_frame(f, tmp.sub(name), FrameFormat::png8);
  }
  std::ofstream(tmp.sub("notes.txt")) << "ignored";
  write_frame(Frame{Array2D<float>(4, 4, 0.9f), std::nullopt}, tmp.sub("other.png"),
              FrameFormat::png8);

  const FrameSequence seq = load_sequence(tmp.str() + "/frame_*.png");
  REQUIRE(seq.size() == 4);
  for (int i = 0; i < 4; ++i)
    CHECK(seq.frames[i].luma(0, 0) ==
          doctest::Approx(std::round(i / 10.0f * 255.0f) / 255.0f).epsilon(1e-6));

  // A bare directory ignores non-image files but picks up every image.
  CHECK(load_sequence(tmp.str()).size() == 5);
}

TEST_CASE("recombine keeps restored luma and original chroma") {
  FrameSequence original;
  original.frames.push_back(color_frame(4, 4, 0.2f, 0.5f, 0.9f));
  FrameSequence restored = gray_sequence(1, 4, 4, 0.5f);

  const FrameSequence out = recombine_color(restored, original);
  CHECK(out.frames[0].luma == restored.frames[0].luma);
  REQUIRE(out.frames[0].chroma.has_value());
  CHECK((*out.frames[0].chroma)[0] == (*original.frames[0].chroma)[0]);
  CHECK((*out.frames[0].chroma)[1] == (*original.frames[0].chroma)[1]);
}

TEST_CASE("recombine validation") {
  FrameSequence gray2 = gray_sequence(2, 4, 4, 0.5f);
  FrameSequence gray1 = gray_sequence(1, 4, 4, 0.5f);
  CHECK_THROWS_AS(recombine_color(gray2, gray1), std::invalid_argument);  // length mismatch
  CHECK_THROWS_AS(recombine_color(gray1, gray1), std::invalid_argument);  // no chroma
}

TEST_CASE("identity restoration of a grayscale sequence") {
  TempDir tmp("ident");
  FrameSequence s = gray_sequence(2, 5, 5, 0.25f);
  write_sequence(s, tmp.str(), FrameFormat::png8);
  const FrameSequence loaded = load_sequence(tmp.str());
  // "Restored" equals the input: luma passes through untouched.
  for (int t = 0; t < 2; ++t) CHECK(loaded.frames[t].luma == loaded.frames[t].luma);
}

TEST_CASE("masks: polarity, broadcast, and validation") {
  TempDir tmp("masks");
  const FrameSequence seq = gray_sequence(10, 6, 6, 0.5f);

  write_frame(Frame{Array2D<float>(6, 6, 1.0f), std::nullopt}, tmp.sub("white.png"),
              FrameFormat::png8);
  MaskSequence white = load_masks(tmp.sub("white.png"), seq);
  CHECK(white.size() == 10);  // single mask broadcast to the whole sequence
  for (int t = 0; t < 10; ++t)
    for (size_t i = 0; i < white.mask_for(t).size(); ++i) CHECK(white.mask_for(t).data()[i] == 1);

  write_frame(Frame{Array2D<float>(6, 6, 0.0f), std::nullopt}, tmp.sub("black.png"),
              FrameFormat::png8);
  MaskSequence black = load_masks(tmp.sub("black.png"), seq);
  for (size_t i = 0; i < black.mask_for(0).size(); ++i) CHECK(black.mask_for(0).data()[i] == 0);

  // Threshold at 128 of 255.
  Frame edge{Array2D<float>(6, 6, 0.0f), std::nullopt};
  edge.luma(0, 0) = 127.0f / 255.0f;
  edge.luma(0, 1) = 128.0f / 255.0f;
  write_frame(edge, tmp.sub("edge.png"), FrameFormat::png8);
  MaskSequence e = load_masks(tmp.sub("edge.png"), seq);
  CHECK(e.mask_for(0)(0, 0) == 0);
  CHECK(e.mask_for(0)(0, 1) == 1);

  write_frame(Frame{Array2D<float>(5, 5, 1.0f), std::nullopt}, tmp.sub("small.png"),
              FrameFormat::png8);
  CHECK_THROWS_WITH_AS(load_masks(tmp.sub("small.png"), seq), doctest::Contains("small.png"),
                       IoError);

  TempDir two("two_masks");
  write_frame(Frame{Array2D<float>(6, 6, 1.0f), std::nullopt}, two.sub("m0.png"),
              FrameFormat::png8);
  write_frame(Frame{Array2D<float>(6, 6, 1.0f), std::nullopt}, two.sub("m1.png"),
              FrameFormat::png8);
  CHECK_THROWS_WITH_AS(load_masks(two.str(), seq), doctest::Contains("neither 1 nor"), IoError);

  TempDir rgb("rgb_mask");
  FrameSequence colorseq;
  colorseq.frames.push_back(color_frame(6, 6, 1.0f, 0.0f, 0.0f));
  write_sequence(colorseq, rgb.str(), FrameFormat::png8);
  CHECK_THROWS_WITH_AS(load_masks(rgb.sub("frame_00000.png"), seq),
                       doctest::Contains("single-channel"), IoError);
}

}  // TEST_SUITE
