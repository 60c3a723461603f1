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

#ifndef SPECON_CORE_CHECKPOINT_HPP_
#define SPECON_CORE_CHECKPOINT_HPP_

#include <filesystem>
#include <string>

#include "core/edn.hpp"
#include "core/types.hpp"

namespace specon::io {

// Trained model state: encoder, pre-activation dictionaries, the exemplar
// dictionaries used to initialize stage 2, and a JSON metadata header
// (dimensions, training configuration, seed, stage).
struct Checkpoint {
  edn::EncoderParams theta;
  edn::DecoderParams decoders;
  Mat exemplar_ux;
  Mat exemplar_uy;
  std::string meta_json;
};

// Container format: magic "EDNC", u32 version, u32 metadata length, metadata
// bytes, u32 tensor count, then named tensors (u32 name length, name bytes,
// FMAT blob). Tensor payloads are bit-exact.
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace specon::io

#endif  // SPECON_CORE_CHECKPOINT_HPP_
