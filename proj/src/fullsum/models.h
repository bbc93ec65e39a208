// src/fullsum/models.h
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

#ifndef FULLSUM_MODELS_H_
#define FULLSUM_MODELS_H_

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "fullsum/lattice.h"
#include "fullsum/topology.h"

namespace fullsum {

enum class Variant { kCtc, kPHmm, kPHmmS, kHHmm };

std::string_view VariantName(Variant v);
Variant ParseVariant(std::string_view name);
Topology TopologyFor(Variant v);

// Pooled loop/forward probabilities for speech and silence states.
struct TransitionModel {
  double speech_loop = 0.5;
  double speech_forward = 0.5;
  double silence_loop = 0.5;
  double silence_forward = 0.5;

  void Validate() const;
  double LogProb(TransitionClass cls) const;

  static TransitionModel Parse(std::istream &in);
  static TransitionModel Read(const std::string &path);
  std::string ToText() const;
};

class PriorModel {
 public:
  PriorModel() = default;
  explicit PriorModel(std::vector<double> probs);

  const std::vector<double> &probs() const { return probs_; }
  int size() const { return static_cast<int>(probs_.size()); }
  double LogProb(int label) const { return log_probs_[label]; }

  // "label-name probability" per line; names resolved via |names|.
  static PriorModel Parse(std::istream &in,
                          const std::vector<std::string> &names);
  static PriorModel Read(const std::string &path,
                         const std::vector<std::string> &names);
  std::string ToText(const std::vector<std::string> &names) const;

 private:
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// alpha: prior, beta: transition, gamma: label posterior, lambda: LM.
struct Scales {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 1.0;
  double lambda = 1.0;

  void Validate() const;
};

Scales DefaultScales(Variant v);

struct ModelSpec {
  Variant variant = Variant::kCtc;
  Scales scales;
  std::optional<TransitionModel> transitions;
  std::optional<PriorModel> prior;

  // Throws if a required transition or prior model is missing.
  void Validate() const;
};

// Per-arc training weight over log posteriors:
//   ctc, p-hmm-s: gamma * log P
//   p-hmm:        gamma * log P + beta * log T(class)
//   h-hmm:        gamma * log P - alpha * log prior + beta * log T(class)
ArcWeightFn MakeArcWeightFn(const ModelSpec &spec,
                            const FrameScores &posteriors);

struct LossAndGradient {
  double loss = 0.0;
  Matrix gradient;  // d loss / d logits, T x L
  SoftAlignment occupation;
};

// -log of the full sum over alignment paths.
double FullSumLoss(const ModelSpec &spec, const AlignmentFsa &fsa,
                   const FrameScores &posteriors,
                   const std::string &utterance = "");

// Gradient with respect to the logits of a log-softmax posterior:
// gamma * (softmax - q) with q the occupation under the variant's weights.
Matrix LossGradient(const ModelSpec &spec, const AlignmentFsa &fsa,
                    const FrameScores &posteriors,
                    const std::string &utterance = "");

LossAndGradient ComputeLossAndGradient(const ModelSpec &spec,
                                       const AlignmentFsa &fsa,
                                       const FrameScores &posteriors,
                                       const std::string &utterance = "");

// Row-wise log-softmax.
Matrix LogSoftmax(const Matrix &logits);

}  // namespace fullsum

#endif  // FULLSUM_MODELS_H_
