// src/fullsum/labels.cc
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

#include "fullsum/labels.h"

#include <fstream>
#include <sstream>

#include "fullsum/common.h"
#include "fullsum/text_util.h"

namespace fullsum {

std::string_view TopologyName(Topology t) {
  return t == Topology::kCtc ? "ctc" : "hmm01";
}

Topology ParseTopology(std::string_view name) {
  if (name == "ctc") return Topology::kCtc;
  if (name == "hmm01" || name == "hmm") return Topology::kHmm01;
  ConfigError("unknown topology '" + std::string(name) + "'");
}

LabelInventory::LabelInventory(std::vector<std::string> phonemes, bool eow,
                               int states_per_phoneme, Topology topology)
    : phonemes_(std::move(phonemes)),
      eow_(eow),
      states_(states_per_phoneme),
      topology_(topology) {
  if (states_ != 1 && states_ != 3)
    ConfigError("states per phoneme must be 1 or 3");
  if (topology_ == Topology::kCtc && states_ != 1)
    ConfigError("ctc topology supports only single-state phonemes");
  if (phonemes_.empty()) ConfigError("empty phoneme inventory");
  for (std::size_t i = 0; i < phonemes_.size(); ++i) {
    const auto &p = phonemes_[i];
    if (p == kSilenceName || p == kBlankName)
      DataError("reserved name '" + p + "' in phoneme inventory");
    if (!phoneme_ids_.emplace(p, static_cast<int>(i)).second)
      DataError("duplicate phoneme '" + p + "' in inventory");
  }
}

int LabelInventory::NumSpeech() const {
  return NumPhonemes() * (eow_ ? 2 : 1) * states_;
}

int LabelInventory::Index(const LabelUnit &unit) const {
  if (unit.kind != LabelUnit::Kind::kPhoneme) {
    bool want_blank = topology_ == Topology::kCtc;
    if ((unit.kind == LabelUnit::Kind::kBlank) != want_blank)
      ConfigError(std::string(want_blank ? "silence" : "blank") +
                  " label does not exist in " +
                  std::string(TopologyName(topology_)) + " inventory");
    return ReservedLabel();
  }
  if (unit.phoneme < 0 || unit.phoneme >= NumPhonemes())
    DataError("phoneme id out of range");
  if (unit.state < 0 || unit.state >= states_)
    DataError("state position out of range");
  if (unit.eow && !eow_) DataError("eow unit in inventory without eow");
  int base = unit.phoneme * (eow_ ? 2 : 1) + (unit.eow ? 1 : 0);
  return base * states_ + unit.state;
}

LabelUnit LabelInventory::Unit(int label) const {
  if (label < 0 || label > ReservedLabel()) DataError("label out of range");
  if (label == ReservedLabel()) {
    LabelUnit u;
    u.kind = topology_ == Topology::kCtc ? LabelUnit::Kind::kBlank
                                         : LabelUnit::Kind::kSilence;
    return u;
  }
  LabelUnit u;
  u.state = label % states_;
  int base = label / states_;
  u.eow = eow_ && (base % 2 == 1);
  u.phoneme = eow_ ? base / 2 : base;
  return u;
}

std::string LabelInventory::Name(int label) const {
  LabelUnit u = Unit(label);
  if (u.kind == LabelUnit::Kind::kBlank) return std::string(kBlankName);
  if (u.kind == LabelUnit::Kind::kSilence) return std::string(kSilenceName);
  std::string name = phonemes_[u.phoneme];
  if (u.eow) name += '#';
  if (states_ > 1) name += "." + std::to_string(u.state);
  return name;
}

int LabelInventory::PhonemeId(std::string_view name) const {
  auto it = phoneme_ids_.find(name);
  return it == phoneme_ids_.end() ? -1 : it->second;
}

std::vector<std::string> ReadPhonemeInventory(const std::string &path) {
  std::ifstream in(path);
  if (!in) DataError("cannot open phoneme inventory '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    out.emplace_back(t);
  }
  return out;
}

Lexicon::Lexicon(std::vector<std::string> phonemes)
    : phonemes_(std::move(phonemes)) {
  for (std::size_t i = 0; i < phonemes_.size(); ++i) {
    if (phonemes_[i] == kSilenceName || phonemes_[i] == kBlankName)
      DataError("reserved name '" + phonemes_[i] + "' in phoneme inventory");
    phoneme_ids_.emplace(phonemes_[i], static_cast<int>(i));
  }
}

void Lexicon::Add(const std::string &word, std::vector<int> phonemes) {
  if (phonemes.empty())
    DataError("empty pronunciation for word '" + word + "'");
  for (int p : phonemes)
    if (p < 0 || p >= static_cast<int>(phonemes_.size()))
      DataError("pronunciation of '" + word + "' uses unknown phoneme id");
  entries_[word].push_back(std::move(phonemes));
}

bool Lexicon::Contains(std::string_view word) const {
  return entries_.find(word) != entries_.end();
}

const std::vector<std::vector<int>> &Lexicon::Variants(
    std::string_view word) const {
  auto it = entries_.find(word);
  if (it == entries_.end())
    DataError("word '" + std::string(word) + "' not in lexicon");
  return it->second;
}

const std::vector<int> &Lexicon::Pronunciation(std::string_view word) const {
  return Variants(word).front();
}

std::vector<std::string> Lexicon::Words() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto &[w, _] : entries_) out.push_back(w);
  return out;
}

Lexicon Lexicon::Parse(std::istream &in, std::vector<std::string> phonemes) {
  Lexicon lex(std::move(phonemes));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = Trim(line);
    if (t.empty() || t.front() == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string_view::npos)
      DataError("lexicon line " + std::to_string(lineno) +
                ": expected WORD<TAB>PHONEMES");
    std::string word(Trim(t.substr(0, tab)));
    std::vector<int> pron;
    for (const auto &p : SplitWhitespace(t.substr(tab + 1))) {
      auto it = lex.phoneme_ids_.find(p);
      if (it == lex.phoneme_ids_.end())
        DataError("lexicon line " + std::to_string(lineno) +
                  ": unknown phoneme '" + p + "'");
      pron.push_back(it->second);
    }
    if (word.empty())
      DataError("lexicon line " + std::to_string(lineno) + ": empty word");
    lex.Add(word, std::move(pron));
  }
  return lex;
}

Lexicon Lexicon::Read(const std::string &path,
                      std::vector<std::string> phonemes) {
  std::ifstream in(path);
  if (!in) DataError("cannot open lexicon '" + path + "'");
  return Parse(in, std::move(phonemes));
}

LabelSequence LabelSequence::FromLabels(std::vector<int> labels,
                                        std::vector<std::size_t> word_ends) {
  LabelSequence seq;
  seq.labels = std::move(labels);
  seq.units.resize(seq.labels.size());
  for (std::size_t i = 0; i < seq.labels.size(); ++i)
    seq.units[i].phoneme = seq.labels[i];
  if (word_ends.empty() && !seq.labels.empty())
    word_ends.push_back(seq.labels.size());
  seq.word_ends = std::move(word_ends);
  for (std::size_t w = 0; w < seq.word_ends.size(); ++w)
    seq.words.push_back("w" + std::to_string(w));
  return seq;
}

LabelSequence BuildLabelSequence(const std::vector<std::string> &transcript,
                                 const Lexicon &lexicon,
                                 const LabelInventory &inventory,
                                 const std::string &utterance) {
  std::string where = utterance.empty() ? "" : " in utterance '" + utterance + "'";
  if (transcript.empty()) DataError("empty transcript" + where);
  LabelSequence seq;
  for (const auto &word : transcript) {
    if (!lexicon.Contains(word))
      DataError("unknown word '" + word + "'" + where);
    const auto &pron = lexicon.Pronunciation(word);
    for (std::size_t i = 0; i < pron.size(); ++i) {
      for (int st = 0; st < inventory.states_per_phoneme(); ++st) {
        LabelUnit u;
        u.phoneme = pron[i];
        u.eow = inventory.eow() && i + 1 == pron.size();
        u.state = st;
        seq.units.push_back(u);
        seq.labels.push_back(inventory.Index(u));
      }
    }
    seq.word_ends.push_back(seq.units.size());
    seq.words.push_back(word);
  }
  return seq;
}

}  // namespace fullsum
