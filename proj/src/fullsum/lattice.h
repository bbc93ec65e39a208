// src/fullsum/lattice.h
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

#ifndef FULLSUM_LATTICE_H_
#define FULLSUM_LATTICE_H_

#include <functional>
#include <string>
#include <vector>

#include "fullsum/common.h"
#include "fullsum/topology.h"

namespace fullsum {

// T x L log-domain scores, one row per frame.
struct FrameScores {
  Matrix scores;
  double frame_shift_ms = 10.0;

  int NumFrames() const { return static_cast<int>(scores.rows()); }
  int NumLabels() const { return static_cast<int>(scores.cols()); }
  // Throws unless every entry is finite or -inf and no row is all -inf.
  void Validate() const;
};

// T x L occupation probabilities.
struct SoftAlignment {
  Matrix occupation;
  double frame_shift_ms = 10.0;
};

struct Segment {
  int label = 0;
  int unit = -1;  // label-sequence position; -1 for silence/blank
  int start = 0;  // first frame
  int end = 0;    // one past the last frame
};

struct WordSegment {
  std::string word;
  int start = 0;
  int end = 0;
};

struct HardAlignment {
  std::vector<int> labels;  // per frame
  std::vector<int> units;   // per frame, -1 for silence/blank
  std::vector<Segment> segments;
  std::vector<WordSegment> words;
  double frame_shift_ms = 10.0;

  int NumFrames() const { return static_cast<int>(labels.size()); }
};

// Log weight of taking |arc| at frame |t|.
using ArcWeightFn = std::function<double(const Arc &arc, int t)>;

// Plain emission weights: scores(t, arc.label).
ArcWeightFn EmissionWeights(const FrameScores &scores);

// log sum over accepted paths of prod_t weight(arc_t, t); kLogZero for an
// empty language.  A null |weights| means EmissionWeights(scores).
double ForwardScore(const AlignmentFsa &fsa, const FrameScores &scores,
                    const ArcWeightFn &weights = nullptr);

struct ForwardBackward {
  double log_total = kLogZero;
  Matrix alpha;  // (T + 1) x states
  Matrix beta;   // (T + 1) x states
  Matrix arc_weights;  // T x arcs
};

ForwardBackward RunForwardBackward(const AlignmentFsa &fsa,
                                   const FrameScores &scores,
                                   const ArcWeightFn &weights = nullptr);

// Baum-Welch label posteriors.  Throws if no path has nonzero weight.
SoftAlignment OccupationProbabilities(const AlignmentFsa &fsa,
                                      const FrameScores &scores,
                                      const ArcWeightFn &weights = nullptr);
// Same from an existing forward-backward result.
SoftAlignment OccupationFromForwardBackward(const AlignmentFsa &fsa,
                                            const ForwardBackward &fb,
                                            int num_labels,
                                            double frame_shift_ms);

struct ViterbiResult {
  double score = kLogZero;
  HardAlignment alignment;
  std::vector<int> state_path;  // state after each frame
};

// Best path.  Ties prefer speech-forward, speech-loop, silence-forward,
// silence-loop, blank arcs in that order, then the lower source state; among
// final states the lower index wins.
ViterbiResult Viterbi(const AlignmentFsa &fsa, const FrameScores &scores,
                      const ArcWeightFn &weights = nullptr);

// Builds segments and word segments for a per-frame state path.
HardAlignment AlignmentFromStatePath(const AlignmentFsa &fsa,
                                     const std::vector<int> &state_path,
                                     double frame_shift_ms);

// Max-pools windows of |factor| frames; the last window may be short.
FrameScores SubsampleScores(const FrameScores &scores, int factor);

// Inverse of subsampling for alignments: every frame becomes |factor| frames
// at 1/factor of the frame shift.
HardAlignment ExpandAlignment(const HardAlignment &hard, int factor);

}  // namespace fullsum

#endif  // FULLSUM_LATTICE_H_
