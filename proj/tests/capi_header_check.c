// tests/capi_header_check.c
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

/* The public header must compile as C. */

#include "fullsum/fullsum.h"

int main(void) {
  fs_config *cfg = 0;
  if (fs_config_new(&cfg) != FS_OK) return 1;
  fs_config_free(cfg);
  return fs_command_count() > 0 ? 0 : 1;
}
