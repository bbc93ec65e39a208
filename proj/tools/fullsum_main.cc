// tools/fullsum_main.cc
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

// Command-line driver.  Options are generated from the library's command
// tables; values come from flags, then the --config file, then defaults.

#include <cinttypes>
#include <cstdio>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fullsum/fullsum.h"

namespace {

struct Subcommand {
  std::string name;
  CLI::App *app = nullptr;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option *> options;
  std::string config_path;
  bool viterbi = false;
  bool baum_welch = false;
};

int ExitCode(fs_status s) {
  switch (s) {
    case FS_OK: return 0;
    case FS_E_USAGE: return 1;
    case FS_E_DATA: return 2;
    default: return 3;
  }
}

struct ConfigDeleter {
  void operator()(fs_config *c) const { fs_config_free(c); }
};

// Reads a flat "key = value" file; a section named after the command is
// accepted too.
bool LoadConfigFile(const Subcommand &sub, fs_config *cfg) {
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_file(sub.config_path);
  } catch (const CLI::Error &e) {
    std::cerr << "fullsum " << sub.name << ": config '" << sub.config_path
              << "': " << e.what() << '\n';
    return false;
  }
  for (const auto &item : items) {
    // The INI reader reports section openings and closings as "++"/"--".
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() &&
        !(item.parents.size() == 1 && item.parents[0] == sub.name) &&
        !(item.parents.size() == 1 && item.parents[0] == "default")) {
      std::cerr << "fullsum " << sub.name << ": config key '"
                << item.fullname() << "' belongs to another section\n";
      return false;
    }
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i)
      value += (i ? "," : "") + item.inputs[i];
    if (fs_config_set(cfg, item.name.c_str(), value.c_str()) != FS_OK) {
      std::cerr << "fullsum: " << fs_last_error() << '\n';
      return false;
    }
  }
  return true;
}

int Run(Subcommand &sub) {
  fs_config *raw = nullptr;
  if (fs_config_new(&raw) != FS_OK) {
    std::cerr << "fullsum: " << fs_last_error() << '\n';
    return 3;
  }
  std::unique_ptr<fs_config, ConfigDeleter> cfg(raw);
  if (!sub.config_path.empty() && !LoadConfigFile(sub, cfg.get())) return 1;
  if (sub.viterbi) sub.values["mode"] = "viterbi";
  if (sub.baum_welch) sub.values["mode"] = "baum-welch";
  for (const auto &[key, opt] : sub.options)
    if (opt->count() > 0 || (key == "mode" && (sub.viterbi || sub.baum_welch)))
      fs_config_set(cfg.get(), key.c_str(), sub.values[key].c_str());

  uint64_t fp = 0;
  fs_status st = fs_fingerprint(sub.name.c_str(), cfg.get(), &fp);
  if (st != FS_OK) {
    std::cerr << "fullsum " << sub.name << ": " << fs_last_error() << '\n'
              << "Run with --help for more information.\n";
    return ExitCode(st);
  }
  std::fprintf(stderr, "fingerprint %016" PRIx64 "\n", fp);
  st = fs_run(sub.name.c_str(), cfg.get(), nullptr);
  if (st != FS_OK) {
    std::cerr << "fullsum " << sub.name << ": " << fs_last_error() << '\n';
    return ExitCode(st);
  }
  return 0;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Full-sum training, alignment and decoding toolkit."};
  app.name("fullsum");
  app.require_subcommand(1, 1);
  app.failure_message(CLI::FailureMessage::help);
  app.set_version_flag("--version", fs_version());

  std::vector<std::unique_ptr<Subcommand>> subs;
  for (int i = 0; i < fs_command_count(); ++i) {
    auto sub = std::make_unique<Subcommand>();
    sub->name = fs_command_name(i);
    sub->app = app.add_subcommand(sub->name, fs_command_help(i));
    sub->app->add_option("--config", sub->config_path,
                         "flat key = value file; flags take precedence");
    const std::string positional = fs_command_positional(i);
    for (int k = 0; k < fs_command_key_count(i); ++k) {
      const char *name, *def, *help;
      int required = 0;
      fs_command_key(i, k, &name, &def, &required, &help);
      std::string desc = help;
      if (*def) desc += " [" + std::string(def) + "]";
      if (required) desc += " (required)";
      std::string flag = name == positional ? name : "--" + std::string(name);
      sub->options[name] =
          sub->app->add_option(flag, sub->values[name], desc);
    }
    if (sub->name == "align") {
      auto *v = sub->app->add_flag("--viterbi", sub->viterbi,
                                   "Viterbi hard alignment (default)");
      auto *b = sub->app->add_flag("--baum-welch", sub->baum_welch,
                                   "Baum-Welch occupation probabilities");
      v->excludes(b);
      v->excludes(sub->options["mode"]);
      b->excludes(sub->options["mode"]);
    }
    subs.push_back(std::move(sub));
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? 0 : 1;
  }
  for (auto &sub : subs)
    if (sub->app->parsed()) return Run(*sub);
  return 1;
}
