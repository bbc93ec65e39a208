// src/fullsum/trainer.cc
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

#include "fullsum/trainer.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "fullsum/parallel.h"

namespace fullsum {

void LrSchedule::Validate() const {
  if (!(peak_lr > 0) || !std::isfinite(peak_lr))
    ConfigError("peak-lr must be positive");
  if (!(oclr_fraction > 0 && oclr_fraction <= 1))
    ConfigError("oclr-fraction must lie in (0, 1]");
  if (!(min_lr >= 0) || !std::isfinite(min_lr))
    ConfigError("min-lr must be non-negative");
}

double LrSchedule::At(long step, long total_steps) const {
  long span = std::max<long>(
      1, std::lround(oclr_fraction * static_cast<double>(total_steps)));
  if (step >= span) return min_lr;
  double start = peak_lr / 10.0;
  double mid = span / 2.0;
  double s = static_cast<double>(step);
  if (s <= mid) return start + (peak_lr - start) * (mid > 0 ? s / mid : 1.0);
  return peak_lr - (peak_lr - start) * (s - mid) / (span - mid);
}

void TrainConfig::Validate() const {
  scales.Validate();
  schedule.Validate();
  if (subsample < 1) ConfigError("subsample factor must be >= 1");
  if (min_duration < 1) ConfigError("min-duration must be >= 1");
  if (epochs < 1) ConfigError("epochs must be >= 1");
  if (batch_size < 1) ConfigError("batch-size must be >= 1");
  if (hidden_dim < 1) ConfigError("hidden-dim must be >= 1");
  if (jobs < 1) ConfigError("jobs must be >= 1");
  if (states_per_phoneme != 1 && states_per_phoneme != 3)
    ConfigError("states-per-phoneme must be 1 or 3");
}

int TrainResult::EpochsToReach(double ratio) const {
  if (trace.empty()) return -1;
  double bar = ratio * trace.front().loss;
  for (const auto &e : trace)
    if (e.epoch > 0 && e.loss <= bar) return e.epoch;
  return -1;
}

std::string FormatLossTrace(const std::vector<EpochStats> &trace) {
  std::ostringstream os;
  os.precision(10);
  os << "epoch,loss,lr\n";
  for (const auto &e : trace) os << e.epoch << ',' << e.loss << ',' << e.lr << '\n';
  return os.str();
}

LabelInventory InventoryFor(const Lexicon &lexicon, Variant variant, bool eow,
                            int states_per_phoneme) {
  return LabelInventory(lexicon.phonemes(), eow, states_per_phoneme,
                        TopologyFor(variant));
}

AlignmentFsa BuildUtteranceFsa(const std::vector<std::string> &words,
                               const Lexicon &lexicon,
                               const LabelInventory &inventory,
                               int min_duration, const std::string &utt) {
  LabelSequence seq = BuildLabelSequence(words, lexicon, inventory, utt);
  AlignmentFsa fsa = inventory.topology() == Topology::kCtc
                         ? BuildCtcFsa(seq, inventory.ReservedLabel())
                         : BuildHmmFsa(seq, inventory.ReservedLabel());
  return ApplyMinDuration(fsa, min_duration);
}

namespace {

struct Prepared {
  const TrainingUtterance *utt;
  AlignmentFsa fsa;
  int frames;  // subsampled
};

struct UttOutcome {
  double loss = 0.0;
  AcousticModel::Params grads;
};

// Sum of utterance losses and, optionally, gradients over |batch|; the
// per-utterance results are reduced in index order.
double BatchLoss(const AcousticModel &model, const ModelSpec &spec,
                 const std::vector<const Prepared *> &batch, int jobs,
                 AcousticModel::Params *grads) {
  std::vector<UttOutcome> out(batch.size());
  ParallelFor(static_cast<int>(batch.size()), jobs, [&](int i) {
    const Prepared &p = *batch[i];
    auto act = model.Forward(p.utt->features);
    FrameScores post;
    post.scores = LogSoftmax(act.logits);
    if (grads) {
      auto lg = ComputeLossAndGradient(spec, p.fsa, post, p.utt->id);
      out[i].loss = lg.loss;
      out[i].grads.SetZeroLike(model.params());
      model.Backward(p.utt->features, act, lg.gradient, &out[i].grads);
    } else {
      out[i].loss = FullSumLoss(spec, p.fsa, post, p.utt->id);
    }
  });
  double loss = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    loss += out[i].loss;
    if (grads) grads->AddScaled(out[i].grads, 1.0);
  }
  return loss;
}

}  // namespace

TrainResult Train(const TrainConfig &config,
                  const std::vector<TrainingUtterance> &corpus,
                  const Lexicon &lexicon,
                  std::optional<TransitionModel> transitions,
                  std::optional<PriorModel> prior,
                  const EpochCallback &on_epoch) {
  config.Validate();
  if (corpus.empty()) DataError("training corpus is empty");
  ModelSpec spec{config.variant, config.scales, std::move(transitions),
                 std::move(prior)};
  spec.Validate();
  LabelInventory inventory = InventoryFor(lexicon, config.variant, config.eow,
                                          config.states_per_phoneme);
  if (spec.prior && spec.prior->size() != inventory.NumLabels())
    ConfigError("prior has " + std::to_string(spec.prior->size()) +
                " labels, inventory has " +
                std::to_string(inventory.NumLabels()));

  TrainResult result;
  std::vector<Prepared> prepared;
  const int input_dim = static_cast<int>(corpus.front().features.cols());
  for (const auto &u : corpus) {
    if (u.features.cols() != input_dim)
      DataError("utterance '" + u.id + "' has feature dimension " +
                std::to_string(u.features.cols()) + ", expected " +
                std::to_string(input_dim));
    AlignmentFsa fsa = BuildUtteranceFsa(u.words, lexicon, inventory,
                                         config.min_duration, u.id);
    int frames = static_cast<int>((u.features.rows() + config.subsample - 1) /
                                  config.subsample);
    int need = fsa.MinPathLength();
    if (need < 0 || frames < need) {
      Warn("skipping utterance '" + u.id + "': " + std::to_string(frames) +
           " frames, at least " + std::to_string(need) + " required");
      ++result.skipped;
      continue;
    }
    prepared.push_back({&u, std::move(fsa), frames});
  }
  if (prepared.empty())
    DataError("all " + std::to_string(result.skipped) +
              " utterances skipped: no alignment lattice fits");
  if (result.skipped > 0)
    Warn(std::to_string(result.skipped) + " of " +
         std::to_string(corpus.size()) + " utterances skipped");

  AcousticModelShape shape{input_dim, config.hidden_dim,
                           inventory.NumLabels(), config.subsample};
  AcousticModel model(shape, config.seed);

  std::vector<const Prepared *> all;
  long total_frames = 0;
  for (const auto &p : prepared) {
    all.push_back(&p);
    total_frames += p.frames;
  }
  auto corpus_loss = [&] {
    return BatchLoss(model, spec, all, config.jobs, nullptr) /
           static_cast<double>(total_frames);
  };

  const int n = static_cast<int>(prepared.size());
  const int batches_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const long total_steps = static_cast<long>(batches_per_epoch) * config.epochs;
  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  EpochStats initial{0, corpus_loss(), config.schedule.At(0, total_steps)};
  result.trace.push_back(initial);
  if (on_epoch) on_epoch(initial);

  long step = 0;
  double lr = 0.0;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (int b = 0; b < batches_per_epoch; ++b, ++step) {
      std::vector<const Prepared *> batch;
      long frames = 0;
      for (int i = b * config.batch_size;
           i < std::min(n, (b + 1) * config.batch_size); ++i) {
        batch.push_back(&prepared[order[i]]);
        frames += prepared[order[i]].frames;
      }
      AcousticModel::Params grads;
      grads.SetZeroLike(model.params());
      double loss = BatchLoss(model, spec, batch, config.jobs, &grads) /
                    static_cast<double>(frames);
      grads.Scale(1.0 / static_cast<double>(frames));
      if (!std::isfinite(loss))
        DataError("non-finite training loss at step " + std::to_string(step));

      if (config.descent_check && step % 10 == 0) {
        const double eps = 1e-6 / std::max(1.0, std::sqrt(grads.SquaredNorm()));
        AcousticModel probe = model;
        probe.mutable_params().AddScaled(grads, -eps);
        double after = BatchLoss(probe, spec, batch, config.jobs, nullptr) /
                       static_cast<double>(frames);
        ++result.descent_checks;
        if (after > loss + 1e-12 * std::max(1.0, std::abs(loss))) {
          ++result.descent_failures;
          Warn("descent check failed at step " + std::to_string(step));
        }
      }
      lr = config.schedule.At(step, total_steps);
      model.mutable_params().AddScaled(grads, -lr);
    }
    EpochStats stats{epoch, corpus_loss(), lr};
    result.trace.push_back(stats);
    if (on_epoch) on_epoch(stats);
  }
  result.model = std::move(model);
  return result;
}

}  // namespace fullsum
