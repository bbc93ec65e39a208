// src/fullsum/common.cc
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

#include "fullsum/common.h"

#include <atomic>
#include <iostream>

namespace fullsum {

namespace {
std::atomic<bool> g_warnings_enabled{true};
}  // namespace

void SetWarningsEnabled(bool enabled) { g_warnings_enabled = enabled; }

void Warn(const std::string &msg) {
  if (g_warnings_enabled) std::cerr << "WARNING: " << msg << '\n';
}

void Info(const std::string &msg) {
  if (g_warnings_enabled) std::cerr << msg << '\n';
}

}  // namespace fullsum
