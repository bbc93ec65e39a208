// src/fullsum/topology.cc
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

#include "fullsum/topology.h"

#include <algorithm>
#include <deque>

#include "fullsum/common.h"

namespace fullsum {

std::string_view TransitionClassName(TransitionClass c) {
  switch (c) {
    case TransitionClass::kSpeechLoop: return "speech-loop";
    case TransitionClass::kSpeechForward: return "speech-forward";
    case TransitionClass::kSilenceLoop: return "silence-loop";
    case TransitionClass::kSilenceForward: return "silence-forward";
    case TransitionClass::kBlank: return "blank";
  }
  return "?";
}

AlignmentFsa::AlignmentFsa(Topology topology, std::vector<FsaState> states,
                           std::vector<Arc> arcs, std::vector<int> initial,
                           std::vector<int> finals,
                           std::vector<std::string> words, int min_duration)
    : topology_(topology),
      states_(std::move(states)),
      arcs_(std::move(arcs)),
      initial_(std::move(initial)),
      finals_(std::move(finals)),
      is_final_(states_.size(), false),
      words_(std::move(words)),
      min_duration_(min_duration) {
  const int n = NumStates();
  for (int f : finals_) {
    if (f < 0 || f >= n) DataError("final state out of range");
    is_final_[f] = true;
  }
  for (int i : initial_)
    if (i < 0 || i >= n) DataError("initial state out of range");
  for (const Arc &a : arcs_) {
    if (a.src < 0 || a.src >= n || a.dst < 0 || a.dst >= n)
      DataError("arc state out of range");
    if (a.label < 0) DataError("negative arc label");
    max_label_ = std::max(max_label_, a.label + 1);
  }
}

int AlignmentFsa::MinPathLength() const {
  std::vector<int> dist(states_.size(), -1);
  std::deque<int> queue;
  for (int s : initial_) {
    if (dist[s] < 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  std::vector<std::vector<int>> out(states_.size());
  for (int i = 0; i < NumArcs(); ++i) out[arcs_[i].src].push_back(i);
  int best = -1;
  while (!queue.empty()) {
    int s = queue.front();
    queue.pop_front();
    if (is_final_[s] && dist[s] > 0 && (best < 0 || dist[s] < best))
      best = dist[s];
    for (int ai : out[s]) {
      int d = arcs_[ai].dst;
      if (dist[d] < 0) {
        dist[d] = dist[s] + 1;
        queue.push_back(d);
      }
    }
  }
  return best;
}

namespace {

int WordOf(const LabelSequence &seq, std::size_t unit) {
  for (std::size_t w = 0; w < seq.word_ends.size(); ++w)
    if (unit < seq.word_ends[w]) return static_cast<int>(w);
  return static_cast<int>(seq.word_ends.size()) - 1;
}

void CheckSequence(const LabelSequence &seq) {
  if (seq.labels.empty()) DataError("empty label sequence");
  if (!seq.word_ends.empty() && seq.word_ends.back() != seq.labels.size())
    DataError("word boundaries do not cover the label sequence");
}

}  // namespace

AlignmentFsa BuildCtcFsa(const LabelSequence &seq, int blank_label) {
  CheckSequence(seq);
  const int S = static_cast<int>(seq.size());
  for (int l : seq.labels)
    if (l == blank_label) DataError("label sequence contains the blank label");
  // State 0: start.  Blank b_i (i = 0..S) is state 1 + 2i, label l_s
  // (s = 0..S-1) is state 2 + 2s.
  auto blank_state = [](int i) { return 1 + 2 * i; };
  auto label_state = [](int s) { return 2 + 2 * s; };
  std::vector<FsaState> states(2 * S + 2);
  for (int i = 0; i <= S; ++i)
    states[blank_state(i)] = {StateKind::kBlank, blank_label, -1, -1};
  for (int s = 0; s < S; ++s)
    states[label_state(s)] = {StateKind::kSpeech, seq.labels[s], s,
                              WordOf(seq, s)};

  std::vector<Arc> arcs;
  const auto fwd = TransitionClass::kSpeechForward;
  const auto loop = TransitionClass::kSpeechLoop;
  const auto blank = TransitionClass::kBlank;
  arcs.push_back({0, blank_state(0), blank_label, blank});
  arcs.push_back({0, label_state(0), seq.labels[0], fwd});
  for (int i = 0; i <= S; ++i) {
    arcs.push_back({blank_state(i), blank_state(i), blank_label, blank});
    if (i < S)
      arcs.push_back({blank_state(i), label_state(i), seq.labels[i], fwd});
  }
  for (int s = 0; s < S; ++s) {
    arcs.push_back({label_state(s), label_state(s), seq.labels[s], loop});
    arcs.push_back({label_state(s), blank_state(s + 1), blank_label, blank});
    if (s + 1 < S && seq.labels[s] != seq.labels[s + 1])
      arcs.push_back(
          {label_state(s), label_state(s + 1), seq.labels[s + 1], fwd});
  }
  return AlignmentFsa(Topology::kCtc, std::move(states), std::move(arcs), {0},
                      {label_state(S - 1), blank_state(S)}, seq.words);
}

AlignmentFsa BuildHmmFsa(const LabelSequence &seq,
                         std::optional<int> silence_label) {
  CheckSequence(seq);
  const int S = static_cast<int>(seq.size());
  std::vector<std::size_t> ends = seq.word_ends;
  if (ends.empty()) ends.push_back(seq.size());
  const int W = static_cast<int>(ends.size());
  if (silence_label)
    for (int l : seq.labels)
      if (l == *silence_label)
        DataError("label sequence contains the silence label");

  // State 0: start; units 1..S; silence j (j = 0..W) at S + 1 + j.
  std::vector<FsaState> states(1 + S + (silence_label ? W + 1 : 0));
  auto unit_state = [](int s) { return 1 + s; };
  auto sil_state = [S](int j) { return 1 + S + j; };
  for (int s = 0; s < S; ++s)
    states[unit_state(s)] = {StateKind::kSpeech, seq.labels[s], s,
                             WordOf(seq, s)};
  if (silence_label)
    for (int j = 0; j <= W; ++j)
      states[sil_state(j)] = {StateKind::kSilence, *silence_label, -1, -1};

  const auto sp_fwd = TransitionClass::kSpeechForward;
  const auto sp_loop = TransitionClass::kSpeechLoop;
  const auto si_fwd = TransitionClass::kSilenceForward;
  const auto si_loop = TransitionClass::kSilenceLoop;

  // Forward arcs are classed by their source state; arcs leaving the start
  // state by their target.
  std::vector<Arc> arcs;
  arcs.push_back({0, unit_state(0), seq.labels[0], sp_fwd});
  if (silence_label) {
    arcs.push_back({0, sil_state(0), *silence_label, si_fwd});
    for (int j = 0; j <= W; ++j) {
      arcs.push_back({sil_state(j), sil_state(j), *silence_label, si_loop});
      if (j < W) {
        int first = j == 0 ? 0 : static_cast<int>(ends[j - 1]);
        arcs.push_back(
            {sil_state(j), unit_state(first), seq.labels[first], si_fwd});
      }
    }
  }
  int word = 0;
  for (int s = 0; s < S; ++s) {
    arcs.push_back({unit_state(s), unit_state(s), seq.labels[s], sp_loop});
    if (s + 1 < S)
      arcs.push_back({unit_state(s), unit_state(s + 1), seq.labels[s + 1],
                      sp_fwd});
    if (static_cast<std::size_t>(s + 1) == ends[word]) {
      if (silence_label)
        arcs.push_back(
            {unit_state(s), sil_state(word + 1), *silence_label, sp_fwd});
      ++word;
    }
  }
  std::vector<int> finals{unit_state(S - 1)};
  if (silence_label) finals.push_back(sil_state(W));
  std::vector<std::string> words = seq.words;
  if (words.empty()) words.resize(W);
  return AlignmentFsa(Topology::kHmm01, std::move(states), std::move(arcs),
                      {0}, std::move(finals), std::move(words));
}

AlignmentFsa ApplyMinDuration(const AlignmentFsa &fsa, int k) {
  if (k < 1) ConfigError("minimum duration must be >= 1");
  if (k == 1) return fsa;
  if (fsa.min_duration() != 1)
    ConfigError("minimum duration already applied to this automaton");
  const int n = fsa.NumStates();
  // entry[s] receives the incoming arcs of s, exit[s] carries its loop and
  // outgoing arcs.  Speech states get k - 1 extra copies.
  std::vector<int> entry(n), exit(n);
  std::vector<FsaState> states;
  std::vector<Arc> arcs;
  for (int s = 0; s < n; ++s) {
    const FsaState &st = fsa.state(s);
    entry[s] = static_cast<int>(states.size());
    states.push_back(st);
    if (st.kind == StateKind::kSpeech) {
      for (int c = 1; c < k; ++c) {
        int prev = static_cast<int>(states.size()) - 1;
        states.push_back(st);
        arcs.push_back({prev, prev + 1, st.label, TransitionClass::kSpeechLoop});
      }
    }
    exit[s] = static_cast<int>(states.size()) - 1;
  }
  for (const Arc &a : fsa.arcs()) {
    int src = exit[a.src];
    int dst = a.src == a.dst ? exit[a.dst] : entry[a.dst];
    arcs.push_back({src, dst, a.label, a.cls});
  }
  std::vector<int> initial, finals;
  for (int s : fsa.initial()) initial.push_back(entry[s]);
  for (int s : fsa.finals()) finals.push_back(exit[s]);
  return AlignmentFsa(fsa.topology(), std::move(states), std::move(arcs),
                      std::move(initial), std::move(finals), fsa.words(), k);
}

}  // namespace fullsum
