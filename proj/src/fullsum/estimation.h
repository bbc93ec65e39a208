// src/fullsum/estimation.h
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

#ifndef FULLSUM_ESTIMATION_H_
#define FULLSUM_ESTIMATION_H_

#include <istream>
#include <string>
#include <vector>

#include "fullsum/labels.h"
#include "fullsum/lattice.h"
#include "fullsum/models.h"

namespace fullsum {

// One line of a corpus metadata file: utt-id<TAB>duration-ms<TAB>words...
struct CorpusEntry {
  std::string id;
  double duration_ms = 0.0;
  std::vector<std::string> words;
};

std::vector<CorpusEntry> ParseCorpusMetadata(std::istream &in);
std::vector<CorpusEntry> ReadCorpusMetadata(const std::string &path);
std::string FormatCorpusMetadata(const std::vector<CorpusEntry> &corpus);

struct PApproxOptions {
  double mean_phoneme_ms = 80.0;
  double frame_shift_ms = 10.0;
  double prior_floor = 1e-4;
};

// Speech loop = 1 - shift / (mean phoneme length per HMM state).  Silence
// loop comes from the mean silence segment, taking each utterance's
// unexplained audio as one begin and one end segment of equal length.
// |corpus| may be empty, in which case silence copies the speech values.
TransitionModel PApproxTransitions(const PApproxOptions &opts,
                                   const std::vector<CorpusEntry> &corpus,
                                   const Lexicon &lexicon,
                                   const LabelInventory &inventory);

// Unnormalised-then-normalised label masses before any floor: speech label
// mass is its count times its expected frames, the reserved label gets the
// residual audio.
std::vector<double> PApproxPriorMasses(const PApproxOptions &opts,
                                       const std::vector<CorpusEntry> &corpus,
                                       const Lexicon &lexicon,
                                       const LabelInventory &inventory);

PriorModel PApproxPrior(const PApproxOptions &opts,
                        const std::vector<CorpusEntry> &corpus,
                        const Lexicon &lexicon,
                        const LabelInventory &inventory);

// Raises entries below |floor| to |floor| and rescales the rest so the
// vector still sums to one.
std::vector<double> ApplyFloor(std::vector<double> probs, double floor);

// Running mean of softmax posteriors over frames.
class MarginalPriorAccumulator {
 public:
  void Add(const FrameScores &log_posteriors);
  long frames() const { return frames_; }
  std::vector<double> Mean() const;

 private:
  Vector sum_;
  long frames_ = 0;
};

PriorModel MarginalPrior(const std::vector<FrameScores> &batches,
                         double floor = 1e-4);

}  // namespace fullsum

#endif  // FULLSUM_ESTIMATION_H_
