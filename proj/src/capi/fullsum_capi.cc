// src/capi/fullsum_capi.cc
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

#include "fullsum/fullsum.h"

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fullsum/common.h"
#include "fullsum/config.h"
#include "fullsum/lattice.h"
#include "fullsum/models.h"
#include "fullsum/pipeline.h"
#include "fullsum/topology.h"

struct fs_config {
  fullsum::Config config;
};

struct fs_matrix {
  fullsum::Matrix m;
};

struct fs_fsa {
  explicit fs_fsa(fullsum::AlignmentFsa f) : fsa(std::move(f)) {}
  fullsum::AlignmentFsa fsa;
};

namespace {

thread_local std::string g_last_error;

fs_status Fail(fs_status status, const std::string &msg) {
  g_last_error = msg;
  return status;
}

template <typename Fn>
fs_status Guard(Fn &&fn) {
  try {
    fn();
    return FS_OK;
  } catch (const fullsum::Error &e) {
    return Fail(e.kind() == fullsum::ErrorKind::kData ? FS_E_DATA : FS_E_USAGE,
                e.what());
  } catch (const std::filesystem::filesystem_error &e) {
    return Fail(FS_E_DATA, e.what());
  } catch (const std::ios_base::failure &e) {
    return Fail(FS_E_DATA, e.what());
  } catch (const std::exception &e) {
    return Fail(FS_E_INTERNAL, e.what());
  } catch (...) {
    return Fail(FS_E_INTERNAL, "unknown error");
  }
}

#define FS_REQUIRE(cond, what) \
  if (!(cond)) return Fail(FS_E_USAGE, what)

const fullsum::CommandSpec *CommandAt(int index) {
  const auto &cmds = fullsum::Commands();
  if (index < 0 || index >= static_cast<int>(cmds.size())) return nullptr;
  return &cmds[index];
}

fullsum::FrameScores Scores(const fs_matrix *m) {
  fullsum::FrameScores s;
  s.scores = m->m;
  return s;
}

}  // namespace

extern "C" {

const char *fs_version(void) { return "0.1.0"; }

const char *fs_last_error(void) { return g_last_error.c_str(); }

void fs_set_logging(int enabled) { fullsum::SetWarningsEnabled(enabled != 0); }

fs_status fs_config_new(fs_config **out) {
  FS_REQUIRE(out, "null output pointer");
  return Guard([&] { *out = new fs_config; });
}

void fs_config_free(fs_config *cfg) { delete cfg; }

fs_status fs_config_set(fs_config *cfg, const char *key, const char *value) {
  FS_REQUIRE(cfg && key && value, "null argument");
  return Guard([&] { cfg->config.Set(key, value); });
}

int fs_command_count(void) {
  return static_cast<int>(fullsum::Commands().size());
}

const char *fs_command_name(int index) {
  const auto *c = CommandAt(index);
  return c ? c->name.c_str() : nullptr;
}

const char *fs_command_help(int index) {
  const auto *c = CommandAt(index);
  return c ? c->help.c_str() : nullptr;
}

const char *fs_command_positional(int index) {
  const auto *c = CommandAt(index);
  return c ? c->positional.c_str() : nullptr;
}

int fs_command_key_count(int index) {
  const auto *c = CommandAt(index);
  return c ? static_cast<int>(c->keys.size()) : -1;
}

fs_status fs_command_key(int index, int key, const char **name,
                         const char **default_value, int *required,
                         const char **help) {
  const auto *c = CommandAt(index);
  FS_REQUIRE(c, "command index out of range");
  FS_REQUIRE(key >= 0 && key < static_cast<int>(c->keys.size()),
             "key index out of range");
  const auto &k = c->keys[key];
  if (name) *name = k.name.c_str();
  if (default_value) *default_value = k.default_value.c_str();
  if (required) *required = k.required ? 1 : 0;
  if (help) *help = k.help.c_str();
  return FS_OK;
}

fs_status fs_fingerprint(const char *command, const fs_config *cfg,
                         uint64_t *fingerprint) {
  FS_REQUIRE(command && cfg && fingerprint, "null argument");
  return Guard([&] {
    *fingerprint = fullsum::ResolveConfig(command, cfg->config).Fingerprint();
  });
}

fs_status fs_run(const char *command, const fs_config *cfg,
                 uint64_t *fingerprint) {
  FS_REQUIRE(command && cfg, "null argument");
  return Guard([&] {
    uint64_t fp = fullsum::RunCommand(command, cfg->config, std::cout);
    std::cout.flush();
    if (fingerprint) *fingerprint = fp;
  });
}

fs_status fs_matrix_new(size_t rows, size_t cols, fs_matrix **out) {
  FS_REQUIRE(out, "null output pointer");
  return Guard([&] {
    auto *m = new fs_matrix;
    m->m = fullsum::Matrix::Zero(static_cast<Eigen::Index>(rows),
                                 static_cast<Eigen::Index>(cols));
    *out = m;
  });
}

void fs_matrix_free(fs_matrix *m) { delete m; }

size_t fs_matrix_rows(const fs_matrix *m) {
  return m ? static_cast<size_t>(m->m.rows()) : 0;
}

size_t fs_matrix_cols(const fs_matrix *m) {
  return m ? static_cast<size_t>(m->m.cols()) : 0;
}

double *fs_matrix_data(fs_matrix *m) { return m ? m->m.data() : nullptr; }

const double *fs_matrix_const_data(const fs_matrix *m) {
  return m ? m->m.data() : nullptr;
}

fs_status fs_fsa_new(fs_topology topology, const int *labels, size_t n,
                     int reserved, int min_duration, fs_fsa **out) {
  FS_REQUIRE(out && (labels || n == 0), "null argument");
  FS_REQUIRE(min_duration >= 1, "min_duration must be at least 1");
  return Guard([&] {
    auto seq = fullsum::LabelSequence::FromLabels(
        std::vector<int>(labels, labels + n));
    std::optional<fullsum::AlignmentFsa> fsa;
    if (topology == FS_TOPOLOGY_CTC) {
      fsa.emplace(fullsum::BuildCtcFsa(seq, reserved));
    } else if (topology == FS_TOPOLOGY_HMM) {
      fsa.emplace(fullsum::BuildHmmFsa(
          seq, reserved >= 0 ? std::optional<int>(reserved) : std::nullopt));
    } else {
      fullsum::UsageError("unknown topology");
    }
    if (min_duration > 1)
      fsa.emplace(fullsum::ApplyMinDuration(*fsa, min_duration));
    *out = new fs_fsa(std::move(*fsa));
  });
}

void fs_fsa_free(fs_fsa *fsa) { delete fsa; }

int fs_fsa_num_states(const fs_fsa *fsa) {
  return fsa ? fsa->fsa.NumStates() : -1;
}

int fs_fsa_min_frames(const fs_fsa *fsa) {
  return fsa ? fsa->fsa.MinPathLength() : -1;
}

fs_status fs_forward_score(const fs_fsa *fsa, const fs_matrix *scores,
                           double *log_total) {
  FS_REQUIRE(fsa && scores && log_total, "null argument");
  return Guard([&] {
    *log_total = fullsum::ForwardScore(fsa->fsa, Scores(scores));
  });
}

fs_status fs_occupation(const fs_fsa *fsa, const fs_matrix *scores,
                        fs_matrix **occupation) {
  FS_REQUIRE(fsa && scores && occupation, "null argument");
  return Guard([&] {
    auto soft = fullsum::OccupationProbabilities(fsa->fsa, Scores(scores));
    auto *m = new fs_matrix;
    m->m = std::move(soft.occupation);
    *occupation = m;
  });
}

fs_status fs_viterbi(const fs_fsa *fsa, const fs_matrix *scores,
                     int *labels_out, double *score) {
  FS_REQUIRE(fsa && scores && labels_out, "null argument");
  return Guard([&] {
    auto v = fullsum::Viterbi(fsa->fsa, Scores(scores));
    if (v.score == fullsum::kLogZero)
      fullsum::DataError("no alignment path has nonzero weight");
    std::copy(v.alignment.labels.begin(), v.alignment.labels.end(),
              labels_out);
    if (score) *score = v.score;
  });
}

fs_status fs_subsample(const fs_matrix *scores, int factor, fs_matrix **out) {
  FS_REQUIRE(scores && out, "null argument");
  return Guard([&] {
    auto s = fullsum::SubsampleScores(Scores(scores), factor);
    auto *m = new fs_matrix;
    m->m = std::move(s.scores);
    *out = m;
  });
}

fs_status fs_loss(const fs_model_spec *spec, const fs_fsa *fsa,
                  const fs_matrix *log_posteriors, double *loss,
                  fs_matrix **gradient) {
  FS_REQUIRE(spec && fsa && log_posteriors && loss, "null argument");
  return Guard([&] {
    fullsum::ModelSpec ms;
    switch (spec->variant) {
      case FS_VARIANT_CTC: ms.variant = fullsum::Variant::kCtc; break;
      case FS_VARIANT_P_HMM: ms.variant = fullsum::Variant::kPHmm; break;
      case FS_VARIANT_P_HMM_S: ms.variant = fullsum::Variant::kPHmmS; break;
      case FS_VARIANT_H_HMM: ms.variant = fullsum::Variant::kHHmm; break;
      default: fullsum::UsageError("unknown variant");
    }
    ms.scales.alpha = spec->alpha;
    ms.scales.beta = spec->beta;
    ms.scales.gamma = spec->gamma;
    if (spec->transitions) {
      fullsum::TransitionModel tm;
      tm.speech_loop = spec->transitions[0];
      tm.speech_forward = spec->transitions[1];
      tm.silence_loop = spec->transitions[2];
      tm.silence_forward = spec->transitions[3];
      ms.transitions = tm;
    }
    if (spec->prior)
      ms.prior = fullsum::PriorModel(std::vector<double>(
          spec->prior, spec->prior + spec->prior_size));
    ms.Validate();
    auto r = fullsum::ComputeLossAndGradient(ms, fsa->fsa,
                                             Scores(log_posteriors));
    *loss = r.loss;
    if (gradient) {
      auto *m = new fs_matrix;
      m->m = std::move(r.gradient);
      *gradient = m;
    }
  });
}

}  // extern "C"
