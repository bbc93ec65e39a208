// src/fullsum/text_util.h
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

#ifndef FULLSUM_TEXT_UTIL_H_
#define FULLSUM_TEXT_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace fullsum {

std::string_view Trim(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);
std::vector<std::string> Split(std::string_view s, char sep);
std::string Join(const std::vector<std::string> &parts, std::string_view sep);

double ParseDouble(std::string_view s, std::string_view what);
long ParseInt(std::string_view s, std::string_view what);

// Writes |contents| to a sibling temp file and renames it over |path|.
void WriteFileAtomic(const std::string &path, const std::string &contents);
std::string ReadFile(const std::string &path);

}  // namespace fullsum

#endif  // FULLSUM_TEXT_UTIL_H_
