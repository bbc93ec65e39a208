// src/fullsum/estimation.cc
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

#include "fullsum/estimation.h"

#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "fullsum/text_util.h"

namespace fullsum {

std::vector<CorpusEntry> ParseCorpusMetadata(std::istream &in) {
  std::vector<CorpusEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto fields = Split(t, '\t');
    if (fields.size() < 3)
      DataError("corpus line " + std::to_string(lineno) +
                ": expected utt-id<TAB>duration-ms<TAB>transcript");
    CorpusEntry e;
    e.id = std::string(Trim(fields[0]));
    e.duration_ms = ParseDouble(fields[1], "duration");
    std::string words;
    for (std::size_t i = 2; i < fields.size(); ++i) words += fields[i] + " ";
    e.words = SplitWhitespace(words);
    if (e.duration_ms < 0) DataError("negative duration for " + e.id);
    out.push_back(std::move(e));
  }
  return out;
}

std::vector<CorpusEntry> ReadCorpusMetadata(const std::string &path) {
  std::ifstream in(path);
  if (!in) DataError("cannot open corpus '" + path + "'");
  return ParseCorpusMetadata(in);
}

std::string FormatCorpusMetadata(const std::vector<CorpusEntry> &corpus) {
  std::ostringstream os;
  for (const auto &e : corpus)
    os << e.id << '\t' << e.duration_ms << '\t' << Join(e.words, " ") << '\n';
  return os.str();
}

namespace {

void CheckOptions(const PApproxOptions &opts) {
  if (!(opts.frame_shift_ms > 0)) ConfigError("frame shift must be positive");
  if (opts.mean_phoneme_ms < opts.frame_shift_ms)
    ConfigError("mean phoneme length must be at least one frame shift");
}

// Expected speech frames of one utterance.
double ExpectedSpeechFrames(const PApproxOptions &opts, const CorpusEntry &e,
                            const Lexicon &lexicon) {
  double phonemes = 0;
  for (const auto &w : e.words) {
    if (!lexicon.Contains(w))
      DataError("unknown word '" + w + "' in utterance '" + e.id + "'");
    phonemes += static_cast<double>(lexicon.Pronunciation(w).size());
  }
  return phonemes * opts.mean_phoneme_ms / opts.frame_shift_ms;
}

// Silence frames of one utterance, clamped at zero.
double ResidualFrames(const PApproxOptions &opts, const CorpusEntry &e,
                      const Lexicon &lexicon) {
  double frames = e.duration_ms / opts.frame_shift_ms;
  double speech = ExpectedSpeechFrames(opts, e, lexicon);
  if (speech > frames) {
    Warn("utterance '" + e.id + "': expected speech frames exceed audio; " +
         "silence clamped to 0");
    return 0.0;
  }
  return frames - speech;
}

}  // namespace

TransitionModel PApproxTransitions(const PApproxOptions &opts,
                                   const std::vector<CorpusEntry> &corpus,
                                   const Lexicon &lexicon,
                                   const LabelInventory &inventory) {
  CheckOptions(opts);
  const double state_ms = opts.mean_phoneme_ms / inventory.states_per_phoneme();
  TransitionModel tm;
  tm.speech_loop = std::max(0.0, 1.0 - opts.frame_shift_ms / state_ms);
  tm.speech_forward = 1.0 - tm.speech_loop;
  double silence = 0.0;
  for (const auto &e : corpus) silence += ResidualFrames(opts, e, lexicon);
  if (corpus.empty() || silence <= 0.0) {
    if (!corpus.empty())
      Warn("no silence in corpus; silence transitions copy speech values");
    tm.silence_loop = tm.speech_loop;
  } else {
    double mean_segment = silence / (2.0 * static_cast<double>(corpus.size()));
    tm.silence_loop = std::max(0.0, 1.0 - 1.0 / mean_segment);
  }
  tm.silence_forward = 1.0 - tm.silence_loop;
  tm.Validate();
  return tm;
}

std::vector<double> PApproxPriorMasses(const PApproxOptions &opts,
                                       const std::vector<CorpusEntry> &corpus,
                                       const Lexicon &lexicon,
                                       const LabelInventory &inventory) {
  CheckOptions(opts);
  if (corpus.empty()) DataError("empty corpus");
  const double per_state = opts.mean_phoneme_ms / opts.frame_shift_ms /
                           inventory.states_per_phoneme();
  std::vector<double> mass(inventory.NumLabels(), 0.0);
  for (const auto &e : corpus) {
    LabelSequence seq = BuildLabelSequence(e.words, lexicon, inventory, e.id);
    for (int l : seq.labels) mass[l] += per_state;
    mass[inventory.ReservedLabel()] += ResidualFrames(opts, e, lexicon);
  }
  double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  if (!(total > 0)) DataError("corpus has no frames");
  for (double &m : mass) m /= total;
  return mass;
}

std::vector<double> ApplyFloor(std::vector<double> probs, double floor) {
  if (floor < 0 || floor * static_cast<double>(probs.size()) >= 1.0)
    ConfigError("prior floor out of range");
  std::vector<bool> fixed(probs.size(), false);
  while (true) {
    double free_mass = 0.0;
    int n_fixed = 0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (fixed[i])
        ++n_fixed;
      else
        free_mass += probs[i];
    }
    double target = 1.0 - floor * n_fixed;
    bool changed = false;
    for (std::size_t i = 0; i < probs.size(); ++i) {
      if (fixed[i]) {
        probs[i] = floor;
        continue;
      }
      probs[i] = free_mass > 0 ? probs[i] * target / free_mass : 0.0;
      if (probs[i] < floor) {
        fixed[i] = true;
        changed = true;
      }
    }
    if (!changed) return probs;
  }
}

PriorModel PApproxPrior(const PApproxOptions &opts,
                        const std::vector<CorpusEntry> &corpus,
                        const Lexicon &lexicon,
                        const LabelInventory &inventory) {
  return PriorModel(
      ApplyFloor(PApproxPriorMasses(opts, corpus, lexicon, inventory),
                 opts.prior_floor));
}

void MarginalPriorAccumulator::Add(const FrameScores &log_posteriors) {
  if (sum_.size() == 0) sum_ = Vector::Zero(log_posteriors.NumLabels());
  if (sum_.size() != log_posteriors.NumLabels())
    DataError("posterior batches differ in label dimension");
  for (int t = 0; t < log_posteriors.NumFrames(); ++t)
    sum_ += log_posteriors.scores.row(t).array().exp().matrix().transpose();
  frames_ += log_posteriors.NumFrames();
}

std::vector<double> MarginalPriorAccumulator::Mean() const {
  if (frames_ < 1) DataError("marginal prior needs at least one frame");
  std::vector<double> out(sum_.size());
  for (Eigen::Index i = 0; i < sum_.size(); ++i)
    out[i] = sum_(i) / static_cast<double>(frames_);
  return out;
}

PriorModel MarginalPrior(const std::vector<FrameScores> &batches,
                         double floor) {
  MarginalPriorAccumulator acc;
  for (const auto &b : batches) acc.Add(b);
  std::vector<double> mean = acc.Mean();
  double z = std::accumulate(mean.begin(), mean.end(), 0.0);
  for (double &m : mean) m /= z;  // absorbs rounding in the softmax rows
  return PriorModel(ApplyFloor(std::move(mean), floor));
}

}  // namespace fullsum
