// Copyright 2026 The specon authors
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

#include "core/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <map>

#include "core/fmat.hpp"

namespace specon::io {

namespace {

constexpr char kMagic[4] = {'E', 'D', 'N', 'C'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& out, uint32_t v) {
  char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
               static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(b, 4);
}

uint32_t get_u32(std::istream& in, const std::string& what) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  require(in.gcount() == 4, ErrorCode::kIo, what + ": truncated");
  return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
         (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

void put_tensor(std::ostream& out, const std::string& name, const Mat& m) {
  put_u32(out, static_cast<uint32_t>(name.size()));
  out.write(name.data(), static_cast<std::streamsize>(name.size()));
  write_fmat(out, m);
}

}  // namespace

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), ErrorCode::kIo, "checkpoint: cannot open " + path.string());
  out.write(kMagic, 4);
  put_u32(out, kVersion);
  put_u32(out, static_cast<uint32_t>(ckpt.meta_json.size()));
  out.write(ckpt.meta_json.data(), static_cast<std::streamsize>(ckpt.meta_json.size()));

  const Mat b1 = ckpt.theta.b1, b2 = ckpt.theta.b2, b3 = ckpt.theta.b3;
  const std::pair<std::string, const Mat*> tensors[] = {
      {"w1", &ckpt.theta.w1}, {"b1", &b1},
      {"w2", &ckpt.theta.w2}, {"b2", &b2},
      {"w3", &ckpt.theta.w3}, {"b3", &b3},
      {"ax_pre", &ckpt.decoders.ax_pre},
      {"ay_pre", &ckpt.decoders.ay_pre},
      {"exemplar_ux", &ckpt.exemplar_ux},
      {"exemplar_uy", &ckpt.exemplar_uy},
  };
  put_u32(out, static_cast<uint32_t>(std::size(tensors)));
  for (const auto& [name, m] : tensors) put_tensor(out, name, *m);
  require(out.good(), ErrorCode::kIo, "checkpoint: write failed");
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), ErrorCode::kIo, "checkpoint: cannot open " + path.string());
  char magic[4];
  in.read(magic, 4);
  require(in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0, ErrorCode::kIo,
          "checkpoint: bad magic");
  require(get_u32(in, "checkpoint") == kVersion, ErrorCode::kIo,
          "checkpoint: unsupported version");
  const uint32_t meta_len = get_u32(in, "checkpoint");
  std::string meta(meta_len, '\0');
  in.read(meta.data(), meta_len);
  require(in.gcount() == static_cast<std::streamsize>(meta_len), ErrorCode::kIo,
          "checkpoint: truncated metadata");

  const uint32_t count = get_u32(in, "checkpoint");
  std::map<std::string, Mat> tensors;
  for (uint32_t i = 0; i < count; ++i) {
    const uint32_t name_len = get_u32(in, "checkpoint");
    require(name_len <= 256, ErrorCode::kIo, "checkpoint: absurd tensor name");
    std::string name(name_len, '\0');
    in.read(name.data(), name_len);
    require(in.gcount() == static_cast<std::streamsize>(name_len), ErrorCode::kIo,
            "checkpoint: truncated tensor name");
    tensors[name] = read_fmat(in, "checkpoint tensor " + name);
  }

  auto take = [&tensors](const std::string& name) {
    auto it = tensors.find(name);
    require(it != tensors.end(), ErrorCode::kIo, "checkpoint: missing tensor " + name);
    return std::move(it->second);
  };
  Checkpoint ckpt;
  ckpt.theta.w1 = take("w1");
  ckpt.theta.w2 = take("w2");
  ckpt.theta.w3 = take("w3");
  ckpt.theta.b1 = take("b1");
  ckpt.theta.b2 = take("b2");
  ckpt.theta.b3 = take("b3");
  ckpt.decoders.ax_pre = take("ax_pre");
  ckpt.decoders.ay_pre = take("ay_pre");
  ckpt.exemplar_ux = take("exemplar_ux");
  ckpt.exemplar_uy = take("exemplar_uy");
  ckpt.meta_json = std::move(meta);
  return ckpt;
}

}  // namespace specon::io
