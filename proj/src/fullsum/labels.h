// src/fullsum/labels.h
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

#ifndef FULLSUM_LABELS_H_
#define FULLSUM_LABELS_H_

#include <istream>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace fullsum {

inline constexpr std::string_view kSilenceName = "[SILENCE]";
inline constexpr std::string_view kBlankName = "[BLANK]";

enum class Topology { kCtc, kHmm01 };

std::string_view TopologyName(Topology t);
Topology ParseTopology(std::string_view name);

struct LabelUnit {
  enum class Kind { kPhoneme, kSilence, kBlank };
  Kind kind = Kind::kPhoneme;
  int phoneme = -1;  // -1 for silence/blank
  bool eow = false;
  int state = 0;

  bool operator==(const LabelUnit &) const = default;
};

// Maps LabelUnits onto dense emission-label indices.  Speech labels occupy
// 0..NumSpeech()-1 ordered by (phoneme, eow, state); the single reserved
// label (silence for HMM topologies, blank for CTC) sits at NumSpeech().
class LabelInventory {
 public:
  LabelInventory() = default;
  LabelInventory(std::vector<std::string> phonemes, bool eow,
                 int states_per_phoneme, Topology topology);

  const std::vector<std::string> &phonemes() const { return phonemes_; }
  bool eow() const { return eow_; }
  int states_per_phoneme() const { return states_; }
  Topology topology() const { return topology_; }

  int NumPhonemes() const { return static_cast<int>(phonemes_.size()); }
  int NumSpeech() const;
  int NumLabels() const { return NumSpeech() + 1; }
  int ReservedLabel() const { return NumSpeech(); }

  int Index(const LabelUnit &unit) const;
  LabelUnit Unit(int label) const;
  std::string Name(int label) const;
  int PhonemeId(std::string_view name) const;  // -1 if unknown

 private:
  std::vector<std::string> phonemes_;
  std::map<std::string, int, std::less<>> phoneme_ids_;
  bool eow_ = true;
  int states_ = 1;
  Topology topology_ = Topology::kHmm01;
};

// Reads a phoneme inventory file: one name per line, '#' comments.
std::vector<std::string> ReadPhonemeInventory(const std::string &path);

class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::vector<std::string> phonemes);

  // Adds a pronunciation; later variants of an existing word are kept but
  // ignored by Pronunciation().
  void Add(const std::string &word, std::vector<int> phonemes);

  const std::vector<std::string> &phonemes() const { return phonemes_; }
  bool Contains(std::string_view word) const;
  const std::vector<int> &Pronunciation(std::string_view word) const;
  const std::vector<std::vector<int>> &Variants(std::string_view word) const;
  // Words in lexicographic order.
  std::vector<std::string> Words() const;
  std::size_t size() const { return entries_.size(); }

  static Lexicon Parse(std::istream &in, std::vector<std::string> phonemes);
  static Lexicon Read(const std::string &path,
                      std::vector<std::string> phonemes);

 private:
  std::vector<std::string> phonemes_;
  std::map<std::string, int, std::less<>> phoneme_ids_;
  std::map<std::string, std::vector<std::vector<int>>, std::less<>> entries_;
};

struct LabelSequence {
  std::vector<LabelUnit> units;
  std::vector<int> labels;           // emission index per unit
  std::vector<std::size_t> word_ends;  // exclusive end unit index per word
  std::vector<std::string> words;

  std::size_t size() const { return labels.size(); }

  // For lattice-level work where only emission indices matter.  With an empty
  // |word_ends| the whole sequence is one word.
  static LabelSequence FromLabels(std::vector<int> labels,
                                  std::vector<std::size_t> word_ends = {});
};

LabelSequence BuildLabelSequence(const std::vector<std::string> &transcript,
                                 const Lexicon &lexicon,
                                 const LabelInventory &inventory,
                                 const std::string &utterance = "");

}  // namespace fullsum

#endif  // FULLSUM_LABELS_H_
