// src/fullsum/synth.h
//
// Copyright 2026 The fullsum Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FULLSUM_SYNTH_H_
#define FULLSUM_SYNTH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "fullsum/estimation.h"
#include "fullsum/formats.h"
#include "fullsum/labels.h"
#include "fullsum/ngram.h"
#include "fullsum/trainer.h"

namespace fullsum {

// Planted-alignment corpus: every utterance is drawn from an HMM-0-1 path
// with geometric segment durations, and each frame's feature is the one-hot
// identity of its label plus Gaussian noise.
struct SynthConfig {
  std::uint64_t seed = 7;
  int utterances = 50;
  int phonemes = 8;  // at most 10
  int vocabulary = 12;
  int min_pronunciation = 2;
  int max_pronunciation = 4;
  int min_words = 2;
  int max_words = 4;
  bool eow = true;
  double speech_loop = 0.875;
  double silence_loop = 0.8;
  double inner_silence = 0.3;  // probability of silence between two words
  double noise = 0.1;
  double frame_shift_ms = 10.0;

  void Validate() const;
};

struct SynthCorpus {
  std::vector<std::string> phonemes;
  Lexicon lexicon;
  LabelInventory inventory;  // HMM inventory used for the planted paths
  std::vector<CorpusEntry> metadata;
  std::vector<Utterance> features;
  AlignmentSet reference;
  NGramLm lm;

  std::vector<TrainingUtterance> TrainingSet() const;
};

SynthCorpus GenerateSynthCorpus(const SynthConfig &config);

// Writes inventory.txt, lexicon.txt, corpus.txt, features.fea,
// reference.ali and lm.arpa into |dir|.
void WriteSynthCorpus(const SynthCorpus &corpus, const std::string &dir);

// Joins a feature archive with corpus metadata by utterance id.
std::vector<TrainingUtterance> JoinCorpus(
    const std::vector<Utterance> &features,
    const std::vector<CorpusEntry> &metadata);

}  // namespace fullsum

#endif  // FULLSUM_SYNTH_H_
