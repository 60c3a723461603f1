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

#include "core/manifest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/error.hpp"

namespace specon::io {

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  require(EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) == 1,
          ErrorCode::kInternal, "sha256: digest failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.is_open(), ErrorCode::kIo, "sha256: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return sha256_hex(buf.str());
}

void write_manifest(const std::filesystem::path& dir, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& rel : files) {
    entries.push_back({{"path", rel}, {"sha256", sha256_file(dir / rel)}});
  }
  nlohmann::json doc;
  doc["files"] = entries;
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  require(out.is_open(), ErrorCode::kIo,
          "manifest: cannot write " + (dir / "manifest.json").string());
  out << doc.dump(2) << "\n";
  require(out.good(), ErrorCode::kIo, "manifest: write failed");
}

}  // namespace specon::io
