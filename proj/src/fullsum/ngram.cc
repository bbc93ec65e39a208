// src/fullsum/ngram.cc
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

#include "fullsum/ngram.h"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "fullsum/common.h"
#include "fullsum/text_util.h"

namespace fullsum {

namespace {

constexpr double kLn10 = 2.302585092994045684;
constexpr double kArpaLogZero = -99.0;

double FromLog10(double v) { return v <= kArpaLogZero ? kLogZero : v * kLn10; }
double ToLog10(double v) { return std::isinf(v) ? kArpaLogZero : v / kLn10; }

}  // namespace

std::vector<std::string> NGramLm::Vocabulary() const {
  std::vector<std::string> out;
  for (const auto &[w, u] : unigrams_)
    if (w != kSentenceBegin) out.push_back(w);
  return out;
}

bool NGramLm::Contains(const std::string &word) const {
  return unigrams_.count(word) > 0;
}

double NGramLm::LogProb(const std::string &history,
                        const std::string &word) const {
  if (word == kSentenceBegin) return kLogZero;
  auto u = unigrams_.find(word);
  if (u == unigrams_.end()) return kLogZero;
  if (order_ < 2) return u->second.log_prob;
  auto b = bigrams_.find({history, word});
  if (b != bigrams_.end()) return b->second;
  auto h = unigrams_.find(history);
  double bow = h == unigrams_.end() ? 0.0 : h->second.backoff;
  return bow + u->second.log_prob;
}

double NGramLm::SentenceLogProb(const std::vector<std::string> &words) const {
  double total = 0.0;
  std::string h = kSentenceBegin;
  for (const auto &w : words) {
    total += LogProb(h, w);
    h = w;
  }
  return total + LogProb(h, kSentenceEnd);
}

double NGramLm::MaxNormalizationError() const {
  double worst = 0.0;
  auto vocab = Vocabulary();
  for (const auto &[h, u] : unigrams_) {
    if (h == kSentenceEnd) continue;
    double sum = 0.0;
    for (const auto &w : vocab) sum += std::exp(LogProb(h, w));
    worst = std::max(worst, std::abs(sum - 1.0));
    if (order_ < 2) break;
  }
  return worst;
}

NGramLm NGramLm::Estimate(const std::vector<std::vector<std::string>> &sentences,
                          const std::vector<std::string> &vocabulary,
                          int order, double discount) {
  if (order < 1 || order > 2) ConfigError("LM order must be 1 or 2");
  if (!(discount > 0 && discount < 1))
    ConfigError("LM discount must lie in (0, 1)");
  std::set<std::string> vocab(vocabulary.begin(), vocabulary.end());
  for (const auto &s : sentences)
    for (const auto &w : s) vocab.insert(w);
  vocab.erase(kSentenceBegin);
  vocab.insert(kSentenceEnd);

  std::map<std::string, double> uni_count;
  std::map<std::string, std::map<std::string, double>> bi_count;
  for (const auto &s : sentences) {
    std::string h = kSentenceBegin;
    for (std::size_t i = 0; i <= s.size(); ++i) {
      const std::string &w = i < s.size() ? s[i] : std::string(kSentenceEnd);
      uni_count[w] += 1.0;
      bi_count[h][w] += 1.0;
      h = w;
    }
  }
  double total = 0.0;
  for (const auto &w : vocab) total += uni_count[w] + 1.0;

  NGramLm lm;
  lm.order_ = order;
  std::map<std::string, double> p_uni;
  for (const auto &w : vocab) {
    p_uni[w] = (uni_count[w] + 1.0) / total;
    lm.unigrams_[w].log_prob = std::log(p_uni[w]);
  }
  lm.unigrams_[kSentenceBegin].log_prob = kLogZero;
  if (order < 2) return lm;

  for (const auto &[h, row] : bi_count) {
    double c = 0.0, seen_mass = 0.0;
    for (const auto &[w, n] : row) {
      c += n;
      seen_mass += p_uni[w];
    }
    double d = seen_mass < 1.0 - 1e-12 ? discount : 0.0;
    for (const auto &[w, n] : row) lm.bigrams_[{h, w}] = std::log((n - d) / c);
    double left = d * static_cast<double>(row.size()) / c;
    lm.unigrams_[h].backoff =
        d > 0 ? std::log(left / (1.0 - seen_mass)) : 0.0;
  }
  return lm;
}

NGramLm NGramLm::ParseArpa(std::istream &in, int max_order) {
  NGramLm lm;
  std::string line;
  int section = -1;  // -1 preamble, 0 \data\, n for \n-grams:
  int declared = 0;
  bool ended = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto t = Trim(line);
    if (t.empty()) continue;
    if (t == "\\data\\") {
      section = 0;
      continue;
    }
    if (t == "\\end\\") {
      ended = true;
      break;
    }
    if (t.front() == '\\') {
      auto s = std::string(t);
      if (s.size() < 9 || s.substr(s.size() - 7) != "-grams:")
        DataError("ARPA line " + std::to_string(lineno) + ": bad section '" +
                  s + "'");
      section = static_cast<int>(ParseInt(s.substr(1, s.size() - 8), "order"));
      if (section > max_order)
        DataError("ARPA model has order " + std::to_string(section) +
                  ", at most " + std::to_string(max_order) + " supported");
      continue;
    }
    if (section == 0) {
      auto eq = t.find('=');
      if (t.substr(0, 5) != "ngram" || eq == std::string_view::npos)
        DataError("ARPA line " + std::to_string(lineno) + ": bad count line");
      int n = static_cast<int>(ParseInt(Trim(t.substr(5, eq - 5)), "order"));
      if (n > max_order)
        DataError("ARPA model has order " + std::to_string(n) + ", at most " +
                  std::to_string(max_order) + " supported");
      declared = std::max(declared, n);
      continue;
    }
    if (section < 1) continue;
    auto f = SplitWhitespace(t);
    if (static_cast<int>(f.size()) < section + 1 ||
        static_cast<int>(f.size()) > section + 2)
      DataError("ARPA line " + std::to_string(lineno) + ": malformed entry");
    double lp = FromLog10(ParseDouble(f[0], "log probability"));
    if (section == 1) {
      Unigram &u = lm.unigrams_[f[1]];
      u.log_prob = lp;
      if (f.size() == 3) u.backoff = FromLog10(ParseDouble(f[2], "backoff"));
    } else {
      lm.bigrams_[{f[1], f[2]}] = lp;
    }
  }
  if (!ended) DataError("ARPA file lacks \\end\\");
  if (lm.unigrams_.empty()) DataError("ARPA file has no unigrams");
  lm.order_ = std::max(1, declared);
  for (const auto &[k, v] : lm.bigrams_)
    if (!lm.unigrams_.count(k.first) || !lm.unigrams_.count(k.second))
      DataError("ARPA bigram '" + k.first + " " + k.second +
                "' uses a word without unigram");
  double err = lm.MaxNormalizationError();
  if (err > 1e-6)
    Warn("ARPA model is not normalised (max deviation " + std::to_string(err) +
         ")");
  return lm;
}

NGramLm NGramLm::ReadArpa(const std::string &path, int max_order) {
  std::ifstream in(path);
  if (!in) DataError("cannot open LM '" + path + "'");
  return ParseArpa(in, max_order);
}

std::string NGramLm::ToArpa() const {
  std::ostringstream os;
  os << std::setprecision(12);
  os << "\\data\\\n";
  os << "ngram 1=" << unigrams_.size() << '\n';
  if (order_ >= 2) os << "ngram 2=" << bigrams_.size() << '\n';
  os << "\n\\1-grams:\n";
  for (const auto &[w, u] : unigrams_) {
    os << ToLog10(u.log_prob) << '\t' << w;
    if (order_ >= 2 && u.backoff != 0.0) os << '\t' << ToLog10(u.backoff);
    os << '\n';
  }
  if (order_ >= 2) {
    os << "\n\\2-grams:\n";
    for (const auto &[k, lp] : bigrams_)
      os << ToLog10(lp) << '\t' << k.first << ' ' << k.second << '\n';
  }
  os << "\n\\end\\\n";
  return os.str();
}

}  // namespace fullsum
