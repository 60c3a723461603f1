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

#include "core/fmat.hpp"

#include <cstring>
#include <fstream>
#include <limits>
#include <ostream>
#include <vector>

namespace specon::io {

namespace {

constexpr char kMagic[4] = {'F', 'M', 'A', 'T'};
constexpr uint32_t kVersion = 1;

void put_u32(std::string& buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f64(std::string& buf, double d) {
  uint64_t bits;
  std::memcpy(&bits, &d, sizeof(bits));
  for (int i = 0; i < 8; ++i) {
    buf.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

uint32_t get_u32(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

double get_f64(const unsigned char* p) {
  uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  double d;
  std::memcpy(&d, &bits, sizeof(d));
  return d;
}

}  // namespace

void write_fmat(std::ostream& out, const Mat& m) {
  require(m.rows() <= std::numeric_limits<uint32_t>::max() &&
              m.cols() <= std::numeric_limits<uint32_t>::max(),
          ErrorCode::kInvalidArgument, "fmat: matrix too large");
  std::string buf;
  buf.reserve(16 + static_cast<size_t>(m.size()) * 8);
  buf.append(kMagic, 4);
  put_u32(buf, kVersion);
  put_u32(buf, static_cast<uint32_t>(m.rows()));
  put_u32(buf, static_cast<uint32_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      put_f64(buf, m(r, c));
    }
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  require(out.good(), ErrorCode::kIo, "fmat: write failed");
}

Mat read_fmat(std::istream& in, const std::string& what) {
  unsigned char header[16];
  in.read(reinterpret_cast<char*>(header), sizeof(header));
  require(in.gcount() == sizeof(header), ErrorCode::kIo, what + ": truncated header");
  require(std::memcmp(header, kMagic, 4) == 0, ErrorCode::kIo, what + ": bad magic");
  require(get_u32(header + 4) == kVersion, ErrorCode::kIo, what + ": unsupported version");
  const uint32_t rows = get_u32(header + 8);
  const uint32_t cols = get_u32(header + 12);
  const size_t count = static_cast<size_t>(rows) * cols;
  std::vector<unsigned char> payload(count * 8);
  if (count > 0) {
    in.read(reinterpret_cast<char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
    require(static_cast<size_t>(in.gcount()) == payload.size(), ErrorCode::kIo,
            what + ": truncated payload");
  }
  Mat m(rows, cols);
  size_t off = 0;
  for (uint32_t r = 0; r < rows; ++r) {
    for (uint32_t c = 0; c < cols; ++c, off += 8) {
      m(r, c) = get_f64(payload.data() + off);
    }
  }
  return m;
}

void write_fmat_file(const std::filesystem::path& path, const Mat& m) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.is_open(), ErrorCode::kIo, "fmat: cannot open " + path.string());
  write_fmat(out, m);
}

Mat read_fmat_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), ErrorCode::kIo, "fmat: cannot open " + path.string());
  return read_fmat(in, path.string());
}

}  // namespace specon::io
