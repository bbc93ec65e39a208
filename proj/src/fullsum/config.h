// src/fullsum/config.h
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

#ifndef FULLSUM_CONFIG_H_
#define FULLSUM_CONFIG_H_

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fullsum {

// Flat string key/value configuration with typed accessors.  Parse errors
// are config errors naming the key.
class Config {
 public:
  void Set(const std::string &key, const std::string &value);
  bool Has(std::string_view key) const;
  void Erase(std::string_view key);

  const std::string &GetString(std::string_view key) const;
  double GetDouble(std::string_view key) const;
  long GetInt(std::string_view key) const;
  bool GetBool(std::string_view key) const;
  // Comma-separated doubles.
  std::vector<double> GetDoubleList(std::string_view key) const;

  const std::map<std::string, std::string, std::less<>> &values() const {
    return values_;
  }

  // "key=value" lines in key order.
  std::string ToText() const;
  static Config ParseText(std::string_view text);

  // FNV-1a 64 over ToText().
  std::uint64_t Fingerprint() const;

 private:
  std::map<std::string, std::string, std::less<>> values_;
};

std::string FingerprintHex(std::uint64_t fp);

}  // namespace fullsum

#endif  // FULLSUM_CONFIG_H_
