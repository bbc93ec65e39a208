// tests/decoder_oracle.h
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

// Random micro decoding problems and an exhaustive reference decoder that
// enumerates every word sequence and every alignment of it.

#ifndef FULLSUM_TESTS_DECODER_ORACLE_H_
#define FULLSUM_TESTS_DECODER_ORACLE_H_

#include <cmath>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "fullsum/decoder.h"
#include "fullsum/labels.h"
#include "fullsum/models.h"
#include "fullsum/ngram.h"
#include "oracle.h"

namespace fullsum::oracle {

struct MicroInstance {
  Lexicon lexicon;
  LabelInventory inventory;
  NGramLm lm;
  FrameScores posteriors;
  Scales scales;
  std::unique_ptr<PriorModel> prior;
  std::unique_ptr<TransitionModel> transitions;

  DecodeOptions Options() const {
    DecodeOptions o;
    o.scales = scales;
    o.prior = prior.get();
    o.transitions = transitions.get();
    return o;
  }
};

inline MicroInstance RandomMicroInstance(std::mt19937 &rng, int max_frames = 6,
                                         int max_vocab = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> n(0.0, 1.5);
  MicroInstance m;
  const int P = 2 + static_cast<int>(rng() % 2);
  std::vector<std::string> phonemes;
  for (int p = 0; p < P; ++p) phonemes.push_back(std::string(1, 'A' + p));
  const bool ctc = rng() % 2 == 0;
  const bool eow = rng() % 2 == 0;
  m.inventory = LabelInventory(phonemes, eow, 1,
                               ctc ? Topology::kCtc : Topology::kHmm01);
  m.lexicon = Lexicon(phonemes);
  const int V = 1 + static_cast<int>(rng() % max_vocab);
  std::vector<std::string> words;
  for (int w = 0; w < V; ++w) {
    std::vector<int> pron(1 + rng() % 2);
    for (int &p : pron) p = static_cast<int>(rng() % P);
    std::string name = "w" + std::to_string(w);
    m.lexicon.Add(name, pron);
    words.push_back(name);
  }
  std::vector<std::vector<std::string>> sentences(1 + rng() % 4);
  for (auto &s : sentences) {
    s.resize(1 + rng() % 3);
    for (auto &w : s) w = words[rng() % V];
  }
  m.lm = NGramLm::Estimate(sentences, words, 2, 0.3 + 0.4 * u(rng));

  const int L = m.inventory.NumLabels();
  const int T = 1 + static_cast<int>(rng() % max_frames);
  Matrix logits(T, L);
  for (int i = 0; i < logits.size(); ++i) logits.data()[i] = n(rng);
  m.posteriors.scores = LogSoftmax(logits);

  m.scales.gamma = 0.5 + u(rng);
  m.scales.lambda = rng() % 4 == 0 ? 0.0 : 2.0 * u(rng);
  if (rng() % 2) {
    std::vector<double> p(L);
    double sum = 0;
    for (double &x : p) sum += (x = 0.1 + u(rng));
    for (double &x : p) x /= sum;
    m.prior = std::make_unique<PriorModel>(p);
    m.scales.alpha = u(rng);
  }
  if (!ctc && rng() % 2) {
    double a = 0.05 + 0.9 * u(rng), b = 0.05 + 0.9 * u(rng);
    m.transitions = std::make_unique<TransitionModel>(
        TransitionModel{a, 1 - a, b, 1 - b});
    m.scales.beta = 2.0 * u(rng);
  }
  return m;
}

inline bool ShortlexLess(const std::vector<std::string> &a,
                         const std::vector<std::string> &b) {
  if (a.size() != b.size()) return a.size() < b.size();
  return a < b;
}

struct OracleResult {
  bool found = false;
  std::vector<std::string> words;
  double score = -std::numeric_limits<double>::infinity();
};

// Exhaustive decoder: every word sequence whose units fit in T frames, every
// alignment path of it, best total score; ties (within 1e-9 relative) go to
// the shorter, then lexicographically smaller, sequence.
inline OracleResult BruteForceDecode(const MicroInstance &m) {
  const FrameScores &post = m.posteriors;
  const int T = post.NumFrames(), L = post.NumLabels();
  const int reserved = m.inventory.ReservedLabel();
  const bool ctc = m.inventory.topology() == Topology::kCtc;
  const Scales &sc = m.scales;
  auto emission = [&](int t, int l) {
    double v = sc.gamma * post.scores(t, l);
    if (sc.alpha != 0.0) v -= sc.alpha * std::log(m.prior->probs()[l]);
    return v;
  };
  auto transition = [&](TransitionClass c) {
    if (ctc || !m.transitions || sc.beta == 0.0) return 0.0;
    double p = 0.0;
    switch (c) {
      case TransitionClass::kSpeechLoop: p = m.transitions->speech_loop; break;
      case TransitionClass::kSpeechForward: p = m.transitions->speech_forward; break;
      case TransitionClass::kSilenceLoop: p = m.transitions->silence_loop; break;
      case TransitionClass::kSilenceForward: p = m.transitions->silence_forward; break;
      default: return 0.0;
    }
    return sc.beta * std::log(p);
  };
  auto lm_score = [&](const std::vector<std::string> &w) {
    double s = m.lm.SentenceLogProb(w);
    return sc.lambda == 0.0 ? 0.0 : sc.lambda * s;
  };

  // ctc: best emission score of any frame string, keyed by its collapse.
  std::map<std::vector<int>, double> ctc_best;
  if (ctc) {
    ForEachString(L, T, [&](const std::vector<int> &y) {
      std::vector<int> collapsed;
      double s = 0.0;
      for (int t = 0; t < T; ++t) s += emission(t, y[t]);
      for (auto [v, len] : Runs(y))
        if (v != reserved) collapsed.push_back(v);
      if (collapsed.empty()) return;
      auto [it, ins] = ctc_best.try_emplace(collapsed, s);
      if (!ins && s > it->second) it->second = s;
    });
  }

  OracleResult best;
  auto words = m.lexicon.Words();
  std::vector<std::string> cur;
  std::function<void()> rec = [&] {
    if (!cur.empty()) {
      LabelSequence seq = BuildLabelSequence(cur, m.lexicon, m.inventory);
      if (static_cast<int>(seq.size()) <= T) {
        double am = -std::numeric_limits<double>::infinity();
        if (ctc) {
          auto it = ctc_best.find(seq.labels);
          if (it != ctc_best.end()) am = it->second;
        } else {
          for (const Path &p : HmmPaths(seq.labels, seq.word_ends, reserved, T)) {
            double s = 0.0;
            for (int t = 0; t < T; ++t)
              s += emission(t, p.labels[t]) + transition(p.classes[t]);
            am = std::max(am, s);
          }
        }
        double total = am + lm_score(cur);
        bool tied = std::abs(total - best.score) <=
                    1e-9 * std::max(1.0, std::abs(best.score));
        if (std::isfinite(total) &&
            (!best.found || (tied ? ShortlexLess(cur, best.words) : total > best.score))) {
          best.found = true;
          best.score = total;
          best.words = cur;
        }
      }
    }
    if (static_cast<int>(cur.size()) >= T) return;
    for (const auto &w : words) {
      cur.push_back(w);
      rec();
      cur.pop_back();
    }
  };
  rec();
  return best;
}

}  // namespace fullsum::oracle

#endif  // FULLSUM_TESTS_DECODER_ORACLE_H_
