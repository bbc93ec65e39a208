// src/fullsum/trainer.h
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

#ifndef FULLSUM_TRAINER_H_
#define FULLSUM_TRAINER_H_

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fullsum/acoustic_model.h"
#include "fullsum/labels.h"
#include "fullsum/models.h"

namespace fullsum {

struct LrSchedule {
  double peak_lr = 5.0;
  double oclr_fraction = 0.9;
  double min_lr = 1e-5;

  void Validate() const;
  // Linear rise from peak/10 to peak at the middle of the one-cycle span,
  // linear fall back to peak/10 at its end, then min_lr.
  double At(long step, long total_steps) const;
};

struct TrainConfig {
  Variant variant = Variant::kPHmmS;
  Scales scales = DefaultScales(Variant::kPHmmS);
  bool eow = true;
  int states_per_phoneme = 1;
  int subsample = 1;
  int min_duration = 1;
  int epochs = 50;
  int batch_size = 5;
  int hidden_dim = 32;
  LrSchedule schedule;
  std::uint64_t seed = 1;
  int jobs = 1;
  bool descent_check = true;

  void Validate() const;
};

struct TrainingUtterance {
  std::string id;
  Matrix features;  // T x D at the base frame rate
  std::vector<std::string> words;
};

struct EpochStats {
  int epoch = 0;  // 0 is the untrained model
  double loss = 0.0;  // mean per (subsampled) frame
  double lr = 0.0;    // learning rate of the epoch's last step
};

struct TrainResult {
  AcousticModel model;
  std::vector<EpochStats> trace;
  int skipped = 0;
  int descent_checks = 0;
  int descent_failures = 0;

  // First epoch whose loss is at most |ratio| times the initial loss, or -1.
  int EpochsToReach(double ratio) const;
};

std::string FormatLossTrace(const std::vector<EpochStats> &trace);

// Alignment FSA of one utterance under |variant|'s topology with MinDur.
AlignmentFsa BuildUtteranceFsa(const std::vector<std::string> &words,
                               const Lexicon &lexicon,
                               const LabelInventory &inventory,
                               int min_duration, const std::string &utt);

LabelInventory InventoryFor(const Lexicon &lexicon, Variant variant, bool eow,
                            int states_per_phoneme);

using EpochCallback = std::function<void(const EpochStats &)>;

// |transitions| and |prior| are fixed during training and must be supplied
// when the variant needs them.
TrainResult Train(const TrainConfig &config,
                  const std::vector<TrainingUtterance> &corpus,
                  const Lexicon &lexicon,
                  std::optional<TransitionModel> transitions = std::nullopt,
                  std::optional<PriorModel> prior = std::nullopt,
                  const EpochCallback &on_epoch = nullptr);

}  // namespace fullsum

#endif  // FULLSUM_TRAINER_H_
