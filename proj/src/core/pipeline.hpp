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

#ifndef SPECON_CORE_PIPELINE_HPP_
#define SPECON_CORE_PIPELINE_HPP_

#include <string>

#include "core/config.hpp"

namespace specon::pipeline {

// Pipeline commands. Each reads its inputs from the directories named in the
// config, writes its outputs plus a manifest.json with SHA-256 checksums, and
// is deterministic in the seed: identical invocations produce byte-identical
// artifacts.

// Draws the synthetic parallel corpus and writes utterances, pitch tracks,
// ground-truth dictionaries/codes, and corpus.json into corpus_dir.
void run_synth(const Config& cfg);

// VAD + unit-sum normalization + MCC + DTW per parallel utterance; writes
// aligned frame pairs and pitch statistics into prepared_dir.
void run_prepare(const Config& cfg);

// Builds the seeded exemplar dictionaries, runs the two training stages, and
// writes the model checkpoint, baseline dictionaries, and loss log.
void run_train(const Config& cfg);

// Converts the evaluation split with the selected system; writes compensated
// frames, transformed pitch, and the solver/encoder codes.
void run_convert(const Config& cfg);

// Scores every converted system directory against the reference target
// utterances; writes report.csv and returns the human-readable table.
std::string run_evaluate(const Config& cfg);

}  // namespace specon::pipeline

#endif  // SPECON_CORE_PIPELINE_HPP_
