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

#ifndef SPECON_CORE_FMAT_HPP_
#define SPECON_CORE_FMAT_HPP_

#include <filesystem>
#include <iosfwd>
#include <string>

#include "core/types.hpp"

namespace specon::io {

// FMAT: magic "FMAT", u32 version = 1, u32 rows, u32 cols, then rows*cols
// IEEE-754 float64 values, row-major. Everything little-endian. The payload
// stores raw bit patterns, so write/read round-trips are bit-exact for all
// values including subnormals and signed zeros.

void write_fmat(std::ostream& out, const Mat& m);
Mat read_fmat(std::istream& in, const std::string& what);

void write_fmat_file(const std::filesystem::path& path, const Mat& m);
Mat read_fmat_file(const std::filesystem::path& path);

}  // namespace specon::io

#endif  // SPECON_CORE_FMAT_HPP_
