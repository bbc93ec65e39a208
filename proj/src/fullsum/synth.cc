// src/fullsum/synth.cc
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

#include "fullsum/synth.h"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <iomanip>
#include <map>
#include <random>
#include <set>
#include <sstream>

#include "fullsum/text_util.h"

namespace fullsum {

namespace {

const char *const kPhonemeNames[] = {"AA", "IY", "UW", "EH", "S",
                                     "T",  "K",  "M",  "N",  "L"};

int Geometric(std::mt19937_64 &rng, double loop) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int d = 1;
  while (u(rng) < loop) ++d;
  return d;
}

}  // namespace

void SynthConfig::Validate() const {
  if (utterances < 1) ConfigError("synth: utterances must be >= 1");
  if (phonemes < 2 || phonemes > 10)
    ConfigError("synth: phonemes must lie in [2, 10]");
  if (vocabulary < 1) ConfigError("synth: vocabulary must be >= 1");
  if (min_pronunciation < 1 || max_pronunciation < min_pronunciation)
    ConfigError("synth: bad pronunciation length range");
  if (min_words < 1 || max_words < min_words)
    ConfigError("synth: bad words-per-utterance range");
  for (double p : {speech_loop, silence_loop, inner_silence})
    if (!(p >= 0 && p < 1)) ConfigError("synth: probabilities must lie in [0, 1)");
  if (!(noise >= 0)) ConfigError("synth: noise must be non-negative");
  if (!(frame_shift_ms > 0)) ConfigError("synth: frame shift must be positive");
}

std::vector<TrainingUtterance> SynthCorpus::TrainingSet() const {
  return JoinCorpus(features, metadata);
}

SynthCorpus GenerateSynthCorpus(const SynthConfig &config) {
  config.Validate();
  std::mt19937_64 rng(config.seed);
  SynthCorpus c;
  for (int p = 0; p < config.phonemes; ++p)
    c.phonemes.push_back(kPhonemeNames[p]);
  c.lexicon = Lexicon(c.phonemes);
  c.inventory = LabelInventory(c.phonemes, config.eow, 1, Topology::kHmm01);

  std::uniform_int_distribution<int> pron_len(config.min_pronunciation,
                                              config.max_pronunciation);
  std::uniform_int_distribution<int> phone(0, config.phonemes - 1);
  std::set<std::vector<int>> prons;
  std::vector<std::string> words;
  for (int attempts = 0; static_cast<int>(words.size()) < config.vocabulary;
       ++attempts) {
    if (attempts > 100000) ConfigError("synth: cannot draw enough distinct words");
    std::vector<int> pron(pron_len(rng));
    for (int &p : pron) p = phone(rng);
    std::string name;
    for (int p : pron) {
      name += kPhonemeNames[p];
      name += '-';
    }
    name.pop_back();
    for (char &ch : name) ch = static_cast<char>(std::tolower(ch));
    if (!prons.insert(pron).second) continue;
    c.lexicon.Add(name, pron);
    words.push_back(name);
  }

  std::uniform_int_distribution<int> n_words(config.min_words, config.max_words);
  std::uniform_int_distribution<int> pick(0, config.vocabulary - 1);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const int sil = c.inventory.ReservedLabel();
  const int dim = c.inventory.NumLabels();
  c.reference.frame_shift_ms = config.frame_shift_ms;
  std::vector<std::vector<std::string>> sentences;

  for (int i = 0; i < config.utterances; ++i) {
    std::ostringstream id;
    id << "utt" << std::setw(4) << std::setfill('0') << i;
    std::vector<std::string> transcript(n_words(rng));
    for (auto &w : transcript) w = words[pick(rng)];
    LabelSequence seq = BuildLabelSequence(transcript, c.lexicon, c.inventory, id.str());

    HardAlignment hard;
    hard.frame_shift_ms = config.frame_shift_ms;
    auto emit = [&](int label, int unit, int frames) {
      hard.segments.push_back({label, unit, hard.NumFrames(),
                               hard.NumFrames() + frames});
      for (int f = 0; f < frames; ++f) {
        hard.labels.push_back(label);
        hard.units.push_back(unit);
      }
    };
    emit(sil, -1, Geometric(rng, config.silence_loop));
    std::size_t unit = 0;
    for (std::size_t w = 0; w < transcript.size(); ++w) {
      int start = hard.NumFrames();
      for (; unit < seq.word_ends[w]; ++unit)
        emit(seq.labels[unit], static_cast<int>(unit),
             Geometric(rng, config.speech_loop));
      hard.words.push_back({transcript[w], start, hard.NumFrames()});
      if (w + 1 < transcript.size() && coin(rng) < config.inner_silence)
        emit(sil, -1, Geometric(rng, config.silence_loop));
    }
    emit(sil, -1, Geometric(rng, config.silence_loop));

    Utterance u;
    u.id = id.str();
    u.features = Matrix::Zero(hard.NumFrames(), dim);
    for (int t = 0; t < hard.NumFrames(); ++t) {
      u.features(t, hard.labels[t]) = 1.0;
      for (int d = 0; d < dim; ++d) u.features(t, d) += config.noise * gauss(rng);
    }
    c.metadata.push_back(
        {u.id, hard.NumFrames() * config.frame_shift_ms, transcript});
    c.features.push_back(std::move(u));
    c.reference.Add(id.str(), std::move(hard));
    sentences.push_back(transcript);
  }
  c.lm = NGramLm::Estimate(sentences, words, 2, 0.5);
  return c;
}

void WriteSynthCorpus(const SynthCorpus &corpus, const std::string &dir) {
  std::filesystem::create_directories(dir);
  std::string inv;
  for (const auto &p : corpus.phonemes) inv += p + "\n";
  WriteFileAtomic(dir + "/inventory.txt", inv);
  std::string lex;
  for (const auto &w : corpus.lexicon.Words()) {
    std::vector<std::string> phones;
    for (int p : corpus.lexicon.Pronunciation(w))
      phones.push_back(corpus.phonemes[p]);
    lex += w + "\t" + Join(phones, " ") + "\n";
  }
  WriteFileAtomic(dir + "/lexicon.txt", lex);
  WriteFileAtomic(dir + "/corpus.txt", FormatCorpusMetadata(corpus.metadata));
  WriteFileAtomic(dir + "/features.fea", SerializeToString([&](std::ostream &o) {
                    WriteFeatureArchive(o, corpus.features);
                  }));
  WriteFileAtomic(dir + "/reference.ali",
                  FormatAlignmentText(corpus.reference, corpus.inventory));
  WriteFileAtomic(dir + "/lm.arpa", corpus.lm.ToArpa());
}

std::vector<TrainingUtterance> JoinCorpus(
    const std::vector<Utterance> &features,
    const std::vector<CorpusEntry> &metadata) {
  std::map<std::string, const CorpusEntry *> by_id;
  for (const auto &e : metadata) by_id[e.id] = &e;
  std::vector<TrainingUtterance> out;
  int missing = 0;
  for (const auto &u : features) {
    auto it = by_id.find(u.id);
    if (it == by_id.end()) {
      ++missing;
      continue;
    }
    out.push_back({u.id, u.features, it->second->words});
  }
  if (missing > 0)
    Warn(std::to_string(missing) +
         " feature utterances have no transcript and are ignored");
  if (out.empty()) DataError("no utterance has both features and a transcript");
  return out;
}

}  // namespace fullsum
