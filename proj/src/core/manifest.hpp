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

#ifndef SPECON_CORE_MANIFEST_HPP_
#define SPECON_CORE_MANIFEST_HPP_

#include <filesystem>
#include <string>
#include <vector>

namespace specon::io {

std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

// Writes dir/manifest.json listing the given files (paths relative to dir)
// with their SHA-256 checksums, sorted by path.
void write_manifest(const std::filesystem::path& dir, std::vector<std::string> files);

}  // namespace specon::io

#endif  // SPECON_CORE_MANIFEST_HPP_
