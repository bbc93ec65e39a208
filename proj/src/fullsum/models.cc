// src/fullsum/models.cc
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

#include "fullsum/models.h"

#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "fullsum/text_util.h"

namespace fullsum {

namespace {

// A zero scale switches a term off even where the log term is -inf.
inline double Scaled(double scale, double log_value) {
  return scale == 0.0 ? 0.0 : scale * log_value;
}

}  // namespace

std::string_view VariantName(Variant v) {
  switch (v) {
    case Variant::kCtc: return "ctc";
    case Variant::kPHmm: return "p-hmm";
    case Variant::kPHmmS: return "p-hmm-s";
    case Variant::kHHmm: return "h-hmm";
  }
  return "?";
}

Variant ParseVariant(std::string_view name) {
  if (name == "ctc") return Variant::kCtc;
  if (name == "p-hmm") return Variant::kPHmm;
  if (name == "p-hmm-s") return Variant::kPHmmS;
  if (name == "h-hmm") return Variant::kHHmm;
  ConfigError("unknown model variant '" + std::string(name) +
              "' (expected ctc, p-hmm, p-hmm-s or h-hmm)");
}

Topology TopologyFor(Variant v) {
  return v == Variant::kCtc ? Topology::kCtc : Topology::kHmm01;
}

void TransitionModel::Validate() const {
  for (double p : {speech_loop, speech_forward, silence_loop, silence_forward})
    if (!(p >= 0.0 && p <= 1.0))
      DataError("transition probability outside [0, 1]");
  if (std::abs(speech_loop + speech_forward - 1.0) > 1e-9 ||
      std::abs(silence_loop + silence_forward - 1.0) > 1e-9)
    DataError("transition loop + forward must sum to 1");
}

double TransitionModel::LogProb(TransitionClass cls) const {
  switch (cls) {
    case TransitionClass::kSpeechLoop: return std::log(speech_loop);
    case TransitionClass::kSpeechForward: return std::log(speech_forward);
    case TransitionClass::kSilenceLoop: return std::log(silence_loop);
    case TransitionClass::kSilenceForward: return std::log(silence_forward);
    case TransitionClass::kBlank: return 0.0;
  }
  return 0.0;
}

TransitionModel TransitionModel::Read(const std::string &path) {
  std::ifstream in(path);
  if (!in) DataError("cannot open transition model '" + path + "'");
  return Parse(in);
}

TransitionModel TransitionModel::Parse(std::istream &in) {
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto parts = SplitWhitespace(t);
    if (parts.size() != 2)
      DataError("transition model: expected 'key value', got '" +
                std::string(t) + "'");
    kv[parts[0]] = ParseDouble(parts[1], parts[0]);
  }
  TransitionModel tm;
  auto get = [&](const char *key) {
    auto it = kv.find(key);
    if (it == kv.end()) DataError(std::string("transition model: missing ") + key);
    return it->second;
  };
  tm.speech_loop = get("speech-loop");
  tm.speech_forward = get("speech-forward");
  tm.silence_loop = get("silence-loop");
  tm.silence_forward = get("silence-forward");
  if (kv.size() != 4) DataError("transition model: unexpected keys");
  tm.Validate();
  return tm;
}

std::string TransitionModel::ToText() const {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "speech-loop " << speech_loop << '\n'
     << "speech-forward " << speech_forward << '\n'
     << "silence-loop " << silence_loop << '\n'
     << "silence-forward " << silence_forward << '\n';
  return os.str();
}

PriorModel::PriorModel(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) DataError("empty prior");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p > 0.0 && p <= 1.0)) DataError("prior entries must lie in (0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) DataError("prior does not sum to 1");
  log_probs_.reserve(probs_.size());
  for (double p : probs_) log_probs_.push_back(std::log(p));
}

PriorModel PriorModel::Read(const std::string &path,
                            const std::vector<std::string> &names) {
  std::ifstream in(path);
  if (!in) DataError("cannot open prior '" + path + "'");
  return Parse(in, names);
}

PriorModel PriorModel::Parse(std::istream &in,
                             const std::vector<std::string> &names) {
  std::map<std::string, double> kv;
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto parts = SplitWhitespace(t);
    if (parts.size() != 2)
      DataError("prior: expected 'label probability', got '" + std::string(t) +
                "'");
    if (!kv.emplace(parts[0], ParseDouble(parts[1], "prior")).second)
      DataError("prior: duplicate label '" + parts[0] + "'");
  }
  std::vector<double> probs;
  for (const auto &n : names) {
    auto it = kv.find(n);
    if (it == kv.end()) DataError("prior: missing label '" + n + "'");
    probs.push_back(it->second);
  }
  if (kv.size() != names.size()) DataError("prior: unknown labels in file");
  return PriorModel(std::move(probs));
}

std::string PriorModel::ToText(const std::vector<std::string> &names) const {
  if (names.size() != probs_.size()) DataError("prior: name count mismatch");
  std::ostringstream os;
  os << std::setprecision(17);
  for (std::size_t i = 0; i < probs_.size(); ++i)
    os << names[i] << ' ' << probs_[i] << '\n';
  return os.str();
}

void Scales::Validate() const {
  for (double s : {alpha, beta, gamma, lambda})
    if (!std::isfinite(s) || s < 0.0)
      ConfigError("scales must be finite and non-negative");
}

Scales DefaultScales(Variant v) {
  Scales s;
  if (v == Variant::kPHmm) s.beta = 0.1;
  if (v == Variant::kHHmm) {
    s.alpha = 0.3;
    s.beta = 0.1;
  }
  return s;
}

void ModelSpec::Validate() const {
  scales.Validate();
  if ((variant == Variant::kPHmm || variant == Variant::kHHmm) && !transitions)
    ConfigError(std::string(VariantName(variant)) +
                " requires a transition model");
  if (variant == Variant::kHHmm && !prior)
    ConfigError("h-hmm requires a prior model");
  if (transitions) transitions->Validate();
}

ArcWeightFn MakeArcWeightFn(const ModelSpec &spec,
                            const FrameScores &posteriors) {
  spec.Validate();
  const double gamma = spec.scales.gamma;
  const Matrix *post = &posteriors.scores;
  switch (spec.variant) {
    case Variant::kCtc:
    case Variant::kPHmmS:
      return [post, gamma](const Arc &arc, int t) {
        return Scaled(gamma, (*post)(t, arc.label));
      };
    case Variant::kPHmm: {
      const double beta = spec.scales.beta;
      const TransitionModel tm = *spec.transitions;
      return [post, gamma, beta, tm](const Arc &arc, int t) {
        return Scaled(gamma, (*post)(t, arc.label)) +
               Scaled(beta, tm.LogProb(arc.cls));
      };
    }
    case Variant::kHHmm: {
      const double alpha = spec.scales.alpha, beta = spec.scales.beta;
      const TransitionModel tm = *spec.transitions;
      if (spec.prior->size() != posteriors.NumLabels())
        DataError("prior dimension does not match posterior dimension");
      std::vector<double> log_prior;
      for (int l = 0; l < spec.prior->size(); ++l)
        log_prior.push_back(spec.prior->LogProb(l));
      return [post, gamma, alpha, beta, tm, log_prior](const Arc &arc, int t) {
        return Scaled(gamma, (*post)(t, arc.label)) -
               Scaled(alpha, log_prior[arc.label]) +
               Scaled(beta, tm.LogProb(arc.cls));
      };
    }
  }
  return nullptr;
}

namespace {

void CheckTopology(const ModelSpec &spec, const AlignmentFsa &fsa) {
  if (TopologyFor(spec.variant) != fsa.topology())
    ConfigError(std::string(VariantName(spec.variant)) + " requires a " +
                std::string(TopologyName(TopologyFor(spec.variant))) +
                " automaton, got " + std::string(TopologyName(fsa.topology())));
}

[[noreturn]] void EmptyLattice(const AlignmentFsa &fsa, int frames,
                               const std::string &utterance) {
  int need = fsa.MinPathLength();
  std::string who = utterance.empty() ? "utterance" : "utterance '" + utterance + "'";
  DataError("empty alignment lattice for " + who + ": " +
            std::to_string(frames) + " frames, at least " +
            (need < 0 ? std::string("(unreachable)") : std::to_string(need)) +
            " required");
}

}  // namespace

double FullSumLoss(const ModelSpec &spec, const AlignmentFsa &fsa,
                   const FrameScores &posteriors,
                   const std::string &utterance) {
  CheckTopology(spec, fsa);
  ArcWeightFn w = MakeArcWeightFn(spec, posteriors);
  double score = ForwardScore(fsa, posteriors, w);
  if (score == kLogZero) EmptyLattice(fsa, posteriors.NumFrames(), utterance);
  return -score;
}

LossAndGradient ComputeLossAndGradient(const ModelSpec &spec,
                                       const AlignmentFsa &fsa,
                                       const FrameScores &posteriors,
                                       const std::string &utterance) {
  CheckTopology(spec, fsa);
  ArcWeightFn w = MakeArcWeightFn(spec, posteriors);
  ForwardBackward fb = RunForwardBackward(fsa, posteriors, w);
  if (fb.log_total == kLogZero)
    EmptyLattice(fsa, posteriors.NumFrames(), utterance);
  LossAndGradient out;
  out.loss = -fb.log_total;
  out.occupation = OccupationFromForwardBackward(
      fsa, fb, posteriors.NumLabels(), posteriors.frame_shift_ms);
  // dL/dlogP(l|t) = -gamma q_t(l); through log-softmax this becomes
  // gamma * (softmax_t - q_t) since every q row sums to one.
  out.gradient = spec.scales.gamma *
                 (posteriors.scores.array().exp().matrix() -
                  out.occupation.occupation);
  return out;
}

Matrix LossGradient(const ModelSpec &spec, const AlignmentFsa &fsa,
                    const FrameScores &posteriors,
                    const std::string &utterance) {
  return ComputeLossAndGradient(spec, fsa, posteriors, utterance).gradient;
}

Matrix LogSoftmax(const Matrix &logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    double m = logits.row(t).maxCoeff();
    double z = (logits.row(t).array() - m).exp().sum();
    out.row(t) = logits.row(t).array() - m - std::log(z);
  }
  return out;
}

}  // namespace fullsum
