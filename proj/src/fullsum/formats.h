// src/fullsum/formats.h
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

#ifndef FULLSUM_FORMATS_H_
#define FULLSUM_FORMATS_H_

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fullsum/labels.h"
#include "fullsum/lattice.h"

namespace fullsum {

// Binary matrix containers, little-endian:
//   magic[4] u32 T, u32 L, f32 frame-shift-ms, payload
// FSC1 and SAL1 carry T x L f32 row-major, HAL1 carries T u32 labels.
void WriteFrameScores(std::ostream &out, const FrameScores &scores);
FrameScores ReadFrameScores(std::istream &in);
void WriteSoftAlignment(std::ostream &out, const SoftAlignment &soft);
SoftAlignment ReadSoftAlignment(std::istream &in);
void WriteHardAlignment(std::ostream &out, const HardAlignment &hard,
                        int num_labels);
HardAlignment ReadHardAlignment(std::istream &in, int *num_labels = nullptr);

FrameScores ReadFrameScoresFile(const std::string &path);
void WriteFrameScoresFile(const std::string &path, const FrameScores &scores);
SoftAlignment ReadSoftAlignmentFile(const std::string &path);
HardAlignment ReadHardAlignmentFile(const std::string &path,
                                    int *num_labels = nullptr);

// Feature archive FEA1: u32 count, then per utterance
//   u32 id-length, id bytes, u32 T, u32 D, T x D f32.
struct Utterance {
  std::string id;
  Matrix features;
};
void WriteFeatureArchive(std::ostream &out,
                         const std::vector<Utterance> &utts);
std::vector<Utterance> ReadFeatureArchive(std::istream &in);
std::vector<Utterance> ReadFeatureArchiveFile(const std::string &path);

// Text alignment interchange:
//   #frame_shift_ms <value>
//   utt-id<TAB>start-frame<TAB>end-frame<TAB>token<TAB>type
// with end exclusive and type one of word, phoneme, silence, blank.
struct AlignmentSet {
  double frame_shift_ms = 10.0;
  std::vector<std::string> order;  // utterance ids in file order
  std::map<std::string, HardAlignment> utts;

  void Add(const std::string &id, HardAlignment hard);
};

// Phoneme, silence and blank segments come from |hard.segments| (names via
// |inventory|), words from |hard.words|.
std::string FormatAlignmentText(const AlignmentSet &set,
                                const LabelInventory &inventory);
// Without an inventory, segment labels are left at -1.
AlignmentSet ParseAlignmentText(std::istream &in,
                                const LabelInventory *inventory = nullptr);
AlignmentSet ReadAlignmentTextFile(const std::string &path,
                                   const LabelInventory *inventory = nullptr);

// Bytes of a container serialised to memory; handy for atomic writes.
template <typename Fn>
std::string SerializeToString(Fn &&fn);

}  // namespace fullsum

#include <sstream>

namespace fullsum {

template <typename Fn>
std::string SerializeToString(Fn &&fn) {
  std::ostringstream os(std::ios::binary);
  fn(os);
  return os.str();
}

}  // namespace fullsum

#endif  // FULLSUM_FORMATS_H_
