// src/fullsum/topology.h
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

#ifndef FULLSUM_TOPOLOGY_H_
#define FULLSUM_TOPOLOGY_H_

#include <optional>
#include <string>
#include <vector>

#include "fullsum/labels.h"

namespace fullsum {

enum class TransitionClass {
  kSpeechLoop,
  kSpeechForward,
  kSilenceLoop,
  kSilenceForward,
  kBlank
};

std::string_view TransitionClassName(TransitionClass c);

enum class StateKind { kStart, kSpeech, kSilence, kBlank };

struct FsaState {
  StateKind kind = StateKind::kStart;
  int label = -1;  // label of every arc entering this state
  int unit = -1;   // position in the label sequence, -1 if none
  int word = -1;   // word index, -1 for start/silence/blank
};

struct Arc {
  int src = 0;
  int dst = 0;
  int label = 0;
  TransitionClass cls = TransitionClass::kSpeechForward;
};

// Alignment automaton in Mealy form: an alignment of T frames is a sequence
// of T arcs from an initial to a final state, arc t emitting frame t's label.
// Every state has a single incoming label, so state paths and label paths
// are interchangeable.  Immutable after construction.
class AlignmentFsa {
 public:
  AlignmentFsa(Topology topology, std::vector<FsaState> states,
               std::vector<Arc> arcs, std::vector<int> initial,
               std::vector<int> finals, std::vector<std::string> words,
               int min_duration = 1);

  Topology topology() const { return topology_; }
  int min_duration() const { return min_duration_; }
  int NumStates() const { return static_cast<int>(states_.size()); }
  int NumArcs() const { return static_cast<int>(arcs_.size()); }
  const std::vector<FsaState> &states() const { return states_; }
  const FsaState &state(int s) const { return states_[s]; }
  const std::vector<Arc> &arcs() const { return arcs_; }
  const std::vector<int> &initial() const { return initial_; }
  const std::vector<int> &finals() const { return finals_; }
  bool IsFinal(int s) const { return is_final_[s]; }
  const std::vector<std::string> &words() const { return words_; }
  // Largest emission label plus one.
  int MaxLabel() const { return max_label_; }

  // Length of the shortest accepted path; -1 if the language is empty.
  int MinPathLength() const;

 private:
  Topology topology_;
  std::vector<FsaState> states_;
  std::vector<Arc> arcs_;
  std::vector<int> initial_;
  std::vector<int> finals_;
  std::vector<bool> is_final_;
  std::vector<std::string> words_;
  int min_duration_ = 1;
  int max_label_ = 0;
};

// Standard CTC lattice with optional blanks at every label boundary and a
// mandatory blank between identical neighbours.
AlignmentFsa BuildCtcFsa(const LabelSequence &seq, int blank_label);

// HMM-0-1 lattice (loop + forward, no skips).  With |silence_label| set, an
// optional looped silence state sits at every word boundary including the
// sentence begin and end.
AlignmentFsa BuildHmmFsa(const LabelSequence &seq,
                         std::optional<int> silence_label);

// Forces every speech state to be occupied at least k consecutive frames by
// expanding it into a chain of k copies; blank and silence are unchanged.
AlignmentFsa ApplyMinDuration(const AlignmentFsa &fsa, int k);

}  // namespace fullsum

#endif  // FULLSUM_TOPOLOGY_H_
