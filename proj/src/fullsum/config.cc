// src/fullsum/config.cc
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

#include "fullsum/config.h"

#include <cstdio>

#include "fullsum/common.h"
#include "fullsum/text_util.h"

namespace fullsum {

void Config::Set(const std::string &key, const std::string &value) {
  if (key.empty()) ConfigError("empty config key");
  values_[key] = value;
}

bool Config::Has(std::string_view key) const {
  return values_.find(key) != values_.end();
}

void Config::Erase(std::string_view key) {
  auto it = values_.find(key);
  if (it != values_.end()) values_.erase(it);
}

const std::string &Config::GetString(std::string_view key) const {
  auto it = values_.find(key);
  if (it == values_.end())
    ConfigError("missing config key '" + std::string(key) + "'");
  return it->second;
}

double Config::GetDouble(std::string_view key) const {
  const std::string &v = GetString(key);
  try {
    return ParseDouble(v, key);
  } catch (const Error &) {
    ConfigError("'" + std::string(key) + "' expects a number, got '" + v + "'");
  }
}

long Config::GetInt(std::string_view key) const {
  const std::string &v = GetString(key);
  try {
    return ParseInt(v, key);
  } catch (const Error &) {
    ConfigError("'" + std::string(key) + "' expects an integer, got '" + v +
                "'");
  }
}

bool Config::GetBool(std::string_view key) const {
  const std::string &v = GetString(key);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  ConfigError("'" + std::string(key) + "' expects true or false, got '" + v +
              "'");
}

std::vector<double> Config::GetDoubleList(std::string_view key) const {
  const std::string &v = GetString(key);
  std::vector<double> out;
  for (const auto &part : Split(v, ',')) {
    try {
      out.push_back(ParseDouble(part, key));
    } catch (const Error &) {
      ConfigError("'" + std::string(key) + "' expects comma-separated numbers");
    }
  }
  if (out.empty()) ConfigError("'" + std::string(key) + "' is empty");
  return out;
}

std::string Config::ToText() const {
  std::string out;
  for (const auto &[k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

Config Config::ParseText(std::string_view text) {
  Config c;
  for (const auto &line : Split(text, '\n')) {
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto eq = t.find('=');
    if (eq == std::string_view::npos)
      ConfigError("config line without '=': '" + std::string(t) + "'");
    c.Set(std::string(Trim(t.substr(0, eq))),
          std::string(Trim(t.substr(eq + 1))));
  }
  return c;
}

std::uint64_t Config::Fingerprint() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : ToText()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string FingerprintHex(std::uint64_t fp) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fp));
  return buf;
}

}  // namespace fullsum
