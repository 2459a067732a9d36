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

#include "turbdip/generator.hpp"

#include <cstring>
#include <fstream>

// Checkpoint layout (little-endian):
//   8 bytes  magic "TDIPCKP1"
//   6 x i32  scales, channels, skip_channels, kernel, latent_channels, reserved(0)
//   2 x i32  mosaic_h, mosaic_w
//   1 x u64  generator seed (frozen weights are re-derived from it)
//   1 x u64  trainable count
//   f64[n]   trainable vector

namespace turbdip {
namespace {
constexpr char kMagic[8] = {'T', 'D', 'I', 'P', 'C', 'K', 'P', '1'};

template <typename T>
void put(std::ofstream& out, const T& v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::ifstream& in, const std::string& path) {
  T v{};
  in.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!in) throw IoError("truncated checkpoint: " + path);
  return v;
}
}  // namespace

void save_checkpoint(const std::string& path, const HourglassConfig& cfg, int mosaic_h,
                     int mosaic_w, uint64_t seed, const std::vector<double>& params) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write checkpoint: " + path);
  out.write(kMagic, sizeof(kMagic));
  const int32_t fields[6] = {cfg.scales, cfg.channels, cfg.skip_channels,
                             cfg.kernel, cfg.latent_channels, 0};
  out.write(reinterpret_cast<const char*>(fields), sizeof(fields));
  put(out, static_cast<int32_t>(mosaic_h));
  put(out, static_cast<int32_t>(mosaic_w));
  put(out, seed);
  put(out, static_cast<uint64_t>(params.size()));
  out.write(reinterpret_cast<const char*>(params.data()),
            static_cast<std::streamsize>(params.size() * sizeof(double)));
  if (!out) throw IoError("checkpoint write failed: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open checkpoint: " + path);
  char magic[8];
  in.read(magic, sizeof(magic));
  if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
    throw IoError("not a turbdip checkpoint (bad magic): " + path);
  Checkpoint ck;
  ck.config.scales = get<int32_t>(in, path);
  ck.config.channels = get<int32_t>(in, path);
  ck.config.skip_channels = get<int32_t>(in, path);
  ck.config.kernel = get<int32_t>(in, path);
  ck.config.latent_channels = get<int32_t>(in, path);
  (void)get<int32_t>(in, path);  // reserved
  ck.mosaic_h = get<int32_t>(in, path);
  ck.mosaic_w = get<int32_t>(in, path);
  ck.seed = get<uint64_t>(in, path);
  const uint64_t n = get<uint64_t>(in, path);
  ck.params.resize(n);
  in.read(reinterpret_cast<char*>(ck.params.data()),
          static_cast<std::streamsize>(n * sizeof(double)));
  if (!in) throw IoError("truncated checkpoint: " + path);
  return ck;
}

}  // namespace turbdip
