// src/fullsum/ngram.h
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

#ifndef FULLSUM_NGRAM_H_
#define FULLSUM_NGRAM_H_

#include <istream>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fullsum {

inline constexpr const char *kSentenceBegin = "<s>";
inline constexpr const char *kSentenceEnd = "</s>";

// Backoff n-gram model of order 1 or 2.  Probabilities are held as natural
// logs; the ARPA text form uses log10.
class NGramLm {
 public:
  NGramLm() = default;

  int order() const { return order_; }
  // Predictable words: the vocabulary without <s>.
  std::vector<std::string> Vocabulary() const;
  bool Contains(const std::string &word) const;

  // ln P(word | history); history is ignored for unigram models.  Unknown
  // words get -inf.
  double LogProb(const std::string &history, const std::string &word) const;
  // ln P(words </s>) with <s> as the first history.
  double SentenceLogProb(const std::vector<std::string> &words) const;

  // Largest |sum_w P(w | h) - 1| over all histories.
  double MaxNormalizationError() const;

  // Bigram estimate with absolute discounting, backing off to an add-one
  // unigram over |vocabulary| plus </s>.  With |order| 1 only the unigram
  // is kept.
  static NGramLm Estimate(const std::vector<std::vector<std::string>> &sentences,
                          const std::vector<std::string> &vocabulary,
                          int order = 2, double discount = 0.5);
  static NGramLm ParseArpa(std::istream &in, int max_order = 2);
  static NGramLm ReadArpa(const std::string &path, int max_order = 2);
  std::string ToArpa() const;

 private:
  struct Unigram {
    double log_prob = 0.0;  // ln
    double backoff = 0.0;   // ln
  };
  int order_ = 1;
  std::map<std::string, Unigram> unigrams_;
  std::map<std::pair<std::string, std::string>, double> bigrams_;
};

}  // namespace fullsum

#endif  // FULLSUM_NGRAM_H_
