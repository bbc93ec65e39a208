// src/fullsum/lattice.cc
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

#include "fullsum/lattice.h"

#include <algorithm>

namespace fullsum {

void FrameScores::Validate() const {
  for (int t = 0; t < NumFrames(); ++t) {
    bool any = false;
    for (int l = 0; l < NumLabels(); ++l) {
      double v = scores(t, l);
      if (std::isnan(v) || v == std::numeric_limits<double>::infinity())
        DataError("frame scores: invalid entry at frame " + std::to_string(t));
      if (v != kLogZero) any = true;
    }
    if (!any)
      DataError("frame scores: frame " + std::to_string(t) + " is all -inf");
  }
}

ArcWeightFn EmissionWeights(const FrameScores &scores) {
  return [&scores](const Arc &arc, int t) { return scores.scores(t, arc.label); };
}

namespace {

void CheckInputs(const AlignmentFsa &fsa, const FrameScores &scores) {
  if (scores.NumFrames() < 1) DataError("frame scores have no frames");
  if (fsa.MaxLabel() > scores.NumLabels())
    DataError("automaton label " + std::to_string(fsa.MaxLabel() - 1) +
              " exceeds score dimension " + std::to_string(scores.NumLabels()));
  scores.Validate();
}

Matrix ArcWeightMatrix(const AlignmentFsa &fsa, const FrameScores &scores,
                       const ArcWeightFn &weights) {
  const int T = scores.NumFrames();
  Matrix w(T, fsa.NumArcs());
  const auto &arcs = fsa.arcs();
  for (int t = 0; t < T; ++t)
    for (int a = 0; a < fsa.NumArcs(); ++a)
      w(t, a) = weights ? weights(arcs[a], t) : scores.scores(t, arcs[a].label);
  return w;
}

int ClassRank(TransitionClass c) {
  switch (c) {
    case TransitionClass::kSpeechForward: return 0;
    case TransitionClass::kSpeechLoop: return 1;
    case TransitionClass::kSilenceForward: return 2;
    case TransitionClass::kSilenceLoop: return 3;
    case TransitionClass::kBlank: return 4;
  }
  return 5;
}

}  // namespace

ForwardBackward RunForwardBackward(const AlignmentFsa &fsa,
                                   const FrameScores &scores,
                                   const ArcWeightFn &weights) {
  CheckInputs(fsa, scores);
  const int T = scores.NumFrames();
  const int N = fsa.NumStates();
  const auto &arcs = fsa.arcs();
  ForwardBackward fb;
  fb.arc_weights = ArcWeightMatrix(fsa, scores, weights);
  fb.alpha = Matrix::Constant(T + 1, N, kLogZero);
  fb.beta = Matrix::Constant(T + 1, N, kLogZero);
  for (int s : fsa.initial()) fb.alpha(0, s) = 0.0;
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < fsa.NumArcs(); ++a) {
      double prev = fb.alpha(t, arcs[a].src);
      if (prev == kLogZero) continue;
      double &cur = fb.alpha(t + 1, arcs[a].dst);
      cur = LogAdd(cur, prev + fb.arc_weights(t, a));
    }
  }
  for (int s : fsa.finals()) {
    fb.beta(T, s) = 0.0;
    fb.log_total = LogAdd(fb.log_total, fb.alpha(T, s));
  }
  for (int t = T - 1; t >= 0; --t) {
    for (int a = 0; a < fsa.NumArcs(); ++a) {
      double next = fb.beta(t + 1, arcs[a].dst);
      if (next == kLogZero) continue;
      double &cur = fb.beta(t, arcs[a].src);
      cur = LogAdd(cur, next + fb.arc_weights(t, a));
    }
  }
  return fb;
}

double ForwardScore(const AlignmentFsa &fsa, const FrameScores &scores,
                    const ArcWeightFn &weights) {
  CheckInputs(fsa, scores);
  const int T = scores.NumFrames();
  const int N = fsa.NumStates();
  const auto &arcs = fsa.arcs();
  Vector alpha = Vector::Constant(N, kLogZero);
  Vector next(N);
  for (int s : fsa.initial()) alpha(s) = 0.0;
  for (int t = 0; t < T; ++t) {
    next.setConstant(kLogZero);
    for (const Arc &arc : arcs) {
      double prev = alpha(arc.src);
      if (prev == kLogZero) continue;
      double w = weights ? weights(arc, t) : scores.scores(t, arc.label);
      next(arc.dst) = LogAdd(next(arc.dst), prev + w);
    }
    std::swap(alpha, next);
  }
  double total = kLogZero;
  for (int s : fsa.finals()) total = LogAdd(total, alpha(s));
  return total;
}

SoftAlignment OccupationFromForwardBackward(const AlignmentFsa &fsa,
                                            const ForwardBackward &fb,
                                            int num_labels,
                                            double frame_shift_ms) {
  if (fb.log_total == kLogZero) DataError("no alignment path");
  const int T = static_cast<int>(fb.arc_weights.rows());
  const auto &arcs = fsa.arcs();
  SoftAlignment soft;
  soft.frame_shift_ms = frame_shift_ms;
  soft.occupation = Matrix::Zero(T, num_labels);
  for (int t = 0; t < T; ++t) {
    for (int a = 0; a < fsa.NumArcs(); ++a) {
      double lp = fb.alpha(t, arcs[a].src) + fb.arc_weights(t, a) +
                  fb.beta(t + 1, arcs[a].dst);
      if (lp == kLogZero) continue;
      soft.occupation(t, arcs[a].label) += std::exp(lp - fb.log_total);
    }
  }
  return soft;
}

SoftAlignment OccupationProbabilities(const AlignmentFsa &fsa,
                                      const FrameScores &scores,
                                      const ArcWeightFn &weights) {
  ForwardBackward fb = RunForwardBackward(fsa, scores, weights);
  return OccupationFromForwardBackward(fsa, fb, scores.NumLabels(),
                                       scores.frame_shift_ms);
}

HardAlignment AlignmentFromStatePath(const AlignmentFsa &fsa,
                                     const std::vector<int> &state_path,
                                     double frame_shift_ms) {
  HardAlignment hard;
  hard.frame_shift_ms = frame_shift_ms;
  const int T = static_cast<int>(state_path.size());
  hard.labels.resize(T);
  hard.units.resize(T);
  for (int t = 0; t < T; ++t) {
    const FsaState &st = fsa.state(state_path[t]);
    hard.labels[t] = st.label;
    hard.units[t] = st.unit;
  }
  for (int t = 0; t < T; ++t) {
    bool extend = !hard.segments.empty() &&
                  hard.segments.back().label == hard.labels[t] &&
                  hard.segments.back().unit == hard.units[t];
    if (extend)
      hard.segments.back().end = t + 1;
    else
      hard.segments.push_back({hard.labels[t], hard.units[t], t, t + 1});
  }
  const int W = static_cast<int>(fsa.words().size());
  std::vector<int> first(W, -1), last(W, -1);
  for (int t = 0; t < T; ++t) {
    int w = fsa.state(state_path[t]).word;
    if (w < 0) continue;
    if (first[w] < 0) first[w] = t;
    last[w] = t;
  }
  for (int w = 0; w < W; ++w)
    if (first[w] >= 0) hard.words.push_back({fsa.words()[w], first[w], last[w] + 1});
  return hard;
}

ViterbiResult Viterbi(const AlignmentFsa &fsa, const FrameScores &scores,
                      const ArcWeightFn &weights) {
  CheckInputs(fsa, scores);
  const int T = scores.NumFrames();
  const int N = fsa.NumStates();
  const auto &arcs = fsa.arcs();
  Vector delta = Vector::Constant(N, kLogZero);
  Vector next(N);
  std::vector<int> back(static_cast<std::size_t>(T) * N, -1);
  for (int s : fsa.initial()) delta(s) = 0.0;
  for (int t = 0; t < T; ++t) {
    next.setConstant(kLogZero);
    int *bp = &back[static_cast<std::size_t>(t) * N];
    for (int a = 0; a < fsa.NumArcs(); ++a) {
      const Arc &arc = arcs[a];
      double prev = delta(arc.src);
      if (prev == kLogZero) continue;
      double w = weights ? weights(arc, t) : scores.scores(t, arc.label);
      double cand = prev + w;
      if (cand == kLogZero) continue;
      int &best = bp[arc.dst];
      bool take = best < 0 || cand > next(arc.dst);
      if (!take && cand == next(arc.dst)) {
        const Arc &cur = arcs[best];
        int r_new = ClassRank(arc.cls), r_cur = ClassRank(cur.cls);
        take = r_new < r_cur || (r_new == r_cur && arc.src < cur.src);
      }
      if (take) {
        best = a;
        next(arc.dst) = cand;
      }
    }
    std::swap(delta, next);
  }
  int best_final = -1;
  for (int s : fsa.finals()) {
    if (delta(s) == kLogZero) continue;
    if (best_final < 0 || delta(s) > delta(best_final) ||
        (delta(s) == delta(best_final) && s < best_final))
      best_final = s;
  }
  if (best_final < 0)
    DataError("no alignment path for " + std::to_string(T) + " frames");
  ViterbiResult result;
  result.score = delta(best_final);
  result.state_path.resize(T);
  int s = best_final;
  for (int t = T - 1; t >= 0; --t) {
    result.state_path[t] = s;
    s = arcs[back[static_cast<std::size_t>(t) * N + s]].src;
  }
  result.alignment =
      AlignmentFromStatePath(fsa, result.state_path, scores.frame_shift_ms);
  return result;
}

FrameScores SubsampleScores(const FrameScores &scores, int factor) {
  if (factor < 1) ConfigError("subsampling factor must be >= 1");
  const int T = scores.NumFrames();
  const int Tout = (T + factor - 1) / factor;
  FrameScores out;
  out.frame_shift_ms = scores.frame_shift_ms * factor;
  out.scores = Matrix::Constant(Tout, scores.NumLabels(), kLogZero);
  for (int t = 0; t < T; ++t)
    out.scores.row(t / factor) =
        out.scores.row(t / factor).cwiseMax(scores.scores.row(t));
  return out;
}

HardAlignment ExpandAlignment(const HardAlignment &hard, int factor) {
  if (factor < 1) ConfigError("expansion factor must be >= 1");
  HardAlignment out;
  out.frame_shift_ms = hard.frame_shift_ms / factor;
  for (int t = 0; t < hard.NumFrames(); ++t) {
    for (int i = 0; i < factor; ++i) {
      out.labels.push_back(hard.labels[t]);
      out.units.push_back(hard.units.empty() ? -1 : hard.units[t]);
    }
  }
  for (Segment s : hard.segments) {
    s.start *= factor;
    s.end *= factor;
    out.segments.push_back(s);
  }
  for (WordSegment w : hard.words) {
    w.start *= factor;
    w.end *= factor;
    out.words.push_back(w);
  }
  return out;
}

}  // namespace fullsum
