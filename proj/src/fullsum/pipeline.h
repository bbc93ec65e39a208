// src/fullsum/pipeline.h
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

#ifndef FULLSUM_PIPELINE_H_
#define FULLSUM_PIPELINE_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "fullsum/acoustic_model.h"
#include "fullsum/config.h"
#include "fullsum/labels.h"
#include "fullsum/models.h"
#include "fullsum/trainer.h"

namespace fullsum {

struct KeySpec {
  std::string name;
  std::string default_value;  // empty means unset
  bool required = false;
  std::string help;
};

struct CommandSpec {
  std::string name;
  std::string help;
  std::string positional;  // key filled from a positional argument, if any
  std::vector<KeySpec> keys;
};

const std::vector<CommandSpec> &Commands();
const CommandSpec &FindCommand(std::string_view name);

// Rejects unknown keys, fills defaults and checks required keys.  The
// result also records the command name, so fingerprints differ by command.
Config ResolveConfig(std::string_view command, const Config &given);

// Runs |command|; results go to the configured output files or |out|.
// Returns the fingerprint of the resolved configuration.
std::uint64_t RunCommand(std::string_view command, const Config &given,
                         std::ostream &out);

// A trained model together with everything needed to score with it.
struct Checkpoint {
  AcousticModel model;
  std::uint64_t fingerprint = 0;
  Config train_config;
  std::vector<std::string> phonemes;
  LabelInventory inventory;
  ModelSpec spec;
  int min_duration = 1;
  double frame_shift_ms = 10.0;  // of the input features
};

Checkpoint LoadCheckpoint(const std::string &path);

// Label names of |inventory| in label order.
std::vector<std::string> LabelNames(const LabelInventory &inventory);

// "auto" scale values take the variant's defaults.
Scales ResolveScales(const Config &config, Variant variant);

}  // namespace fullsum

#endif  // FULLSUM_PIPELINE_H_
