// src/fullsum/decoder.h
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

#ifndef FULLSUM_DECODER_H_
#define FULLSUM_DECODER_H_

#include <limits>
#include <string>
#include <vector>

#include "fullsum/labels.h"
#include "fullsum/lattice.h"
#include "fullsum/models.h"
#include "fullsum/ngram.h"

namespace fullsum {

// Lexical prefix tree over emission labels.  Node 0 is the root and carries
// no label; words end at the node of their last label unit.
struct DecodingGraph {
  struct Node {
    int label = -1;
    int parent = -1;
    std::vector<int> children;   // ordered by label
    std::vector<int> word_ends;  // indices into |words|
  };

  Topology topology = Topology::kHmm01;
  int reserved_label = 0;  // blank (ctc) or silence (hmm)
  int num_labels = 0;
  std::vector<Node> nodes;
  std::vector<std::string> words;  // lexicographic
};

DecodingGraph BuildDecodingGraph(const Lexicon &lexicon,
                                 const LabelInventory &inventory);

struct DecodeOptions {
  Scales scales;
  const PriorModel *prior = nullptr;             // needed when alpha > 0
  const TransitionModel *transitions = nullptr;  // used on hmm graphs
  double beam = std::numeric_limits<double>::infinity();
};

struct DecodeResult {
  std::vector<std::string> words;
  double score = kLogZero;
};

// Per frame: gamma * log P(label) - alpha * log prior(label), plus
// beta * log T(class) on hmm graphs when transitions are given, plus
// lambda * ln P_LM(word | history) on leaving a word end and for </s>.
// Scores within 1e-9 (relative) are ties, resolved towards the shorter word
// sequence and then the lexicographically smaller one.
DecodeResult Decode(const FrameScores &posteriors, const DecodingGraph &graph,
                    const NGramLm &lm, const DecodeOptions &options);

}  // namespace fullsum

#endif  // FULLSUM_DECODER_H_
