// src/fullsum/evaluation.h
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

#ifndef FULLSUM_EVALUATION_H_
#define FULLSUM_EVALUATION_H_

#include <map>
#include <string>
#include <vector>

#include "fullsum/formats.h"
#include "fullsum/lattice.h"

namespace fullsum {

struct TseUtterance {
  std::string id;
  int words = 0;
  double total_ms = 0.0;  // summed start + end distances
};

struct TseReport {
  double mean_ms = 0.0;
  long words = 0;
  std::vector<TseUtterance> utterances;
  std::vector<std::string> skipped;  // utterances with differing words
  double bin_ms = 10.0;
  std::map<long, long> histogram;  // bin index -> boundary count

  std::string ToText() const;
};

// Word start/end distances in ms (frame index times each side's frame
// shift), averaged over both boundaries of every matched word.
TseReport ComputeTse(const AlignmentSet &candidate,
                     const AlignmentSet &reference, double bin_ms = 10.0);

struct WerResult {
  long substitutions = 0;
  long deletions = 0;
  long insertions = 0;
  long reference_words = 0;

  long Errors() const { return substitutions + deletions + insertions; }
  double Percent() const;
  std::string ToText() const;
};

// Minimum edit distance; among optimal alignments substitutions are
// preferred over deletions over insertions.
WerResult AlignWords(const std::vector<std::string> &reference,
                     const std::vector<std::string> &hypothesis);

using Transcripts = std::map<std::string, std::vector<std::string>>;

WerResult ComputeWer(const Transcripts &hypotheses,
                     const Transcripts &references);

// "utt-id<TAB>words..." or the decoder's "utt-id<TAB>words<TAB>score".
Transcripts ReadTranscripts(const std::string &path);

struct PlotInput {
  const SoftAlignment *soft = nullptr;
  const HardAlignment *hard = nullptr;
  const HardAlignment *reference = nullptr;
  std::vector<std::string> label_names;  // optional y-axis names
  std::string title;
};

// Time on x, labels on y: occupation as cell opacity, the hard path as a
// step line, reference segment boundaries as dashed rules.
std::string RenderAlignmentSvg(const PlotInput &input);

}  // namespace fullsum

#endif  // FULLSUM_EVALUATION_H_
