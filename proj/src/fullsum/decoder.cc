// src/fullsum/decoder.cc
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

#include "fullsum/decoder.h"

#include <algorithm>
#include <cmath>
#include <map>

namespace fullsum {

namespace {

double Scaled(double scale, double x) { return scale == 0.0 ? 0.0 : scale * x; }

// Scores this close are ties; summation order alone must not pick a word
// sequence.
bool Tied(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b));
}

enum Phase : int { kLabel = 0, kGap = 1 };

struct Key {
  int history;  // 0 is <s>, otherwise word index + 1
  int node;
  int phase;

  bool operator<(const Key &o) const {
    if (history != o.history) return history < o.history;
    if (node != o.node) return node < o.node;
    return phase < o.phase;
  }
};

struct Hyp {
  double score = kLogZero;
  int link = -1;  // word-link chain
};

struct WordLink {
  int word;
  int prev;
};

class Search {
 public:
  Search(const FrameScores &post, const DecodingGraph &g, const NGramLm &lm,
         const DecodeOptions &opts)
      : post_(post), g_(g), lm_(lm), opts_(opts) {
    use_transitions_ = g.topology == Topology::kHmm01 && opts.transitions &&
                       opts.scales.beta != 0.0;
    lm_cache_.assign(g.words.size() + 1,
                     std::vector<double>(g.words.size() + 1, 0.0));
    for (std::size_t h = 0; h <= g.words.size(); ++h)
      for (std::size_t w = 0; w <= g.words.size(); ++w)
        lm_cache_[h][w] = Scaled(
            opts.scales.lambda,
            lm.LogProb(h == 0 ? std::string(kSentenceBegin) : g.words[h - 1],
                       w == g.words.size() ? std::string(kSentenceEnd)
                                           : g.words[w]));
  }

  DecodeResult Run() {
    const int frames = post_.NumFrames();
    std::map<Key, Hyp> cur;
    Expand(nullptr, Hyp{0.0, -1}, 0, &cur);
    Prune(&cur);
    for (int t = 1; t < frames; ++t) {
      std::map<Key, Hyp> next;
      for (const auto &[k, h] : cur) Expand(&k, h, t, &next);
      Prune(&next);
      cur = std::move(next);
    }
    double best = kLogZero;
    int best_link = -1;
    bool found = false;
    auto offer = [&](double score, int link) {
      if (score == kLogZero || std::isnan(score)) return;
      if (!found ||
          (Tied(score, best) ? Less(link, best_link) : score > best)) {
        found = true;
        best = score;
        best_link = link;
      }
    };
    for (const auto &[k, h] : cur) {
      if (k.phase == kGap && k.node == 0) {
        if (k.history != 0) offer(h.score + LmEnd(k.history), h.link);
      } else if (k.phase == kLabel) {
        for (int w : g_.nodes[k.node].word_ends) {
          double lm = LmLog(k.history, w);
          if (lm == kLogZero) continue;
          offer(h.score + lm + LmEnd(w + 1), Link(w, h.link));
        }
      }
    }
    if (!found) {
      if (std::isinf(opts_.beam))
        DataError("no word sequence fits " + std::to_string(frames) +
                  " frames");
      DataError("no complete hypothesis survived the beam; try a larger beam");
    }
    DecodeResult r;
    r.score = best;
    r.words = Words(best_link);
    return r;
  }

 private:
  double LmLog(int history, int word) const { return lm_cache_[history][word]; }
  double LmEnd(int history) const {
    return lm_cache_[history][g_.words.size()];
  }

  double Emission(int label, int t) const {
    double v = Scaled(opts_.scales.gamma, post_.scores(t, label));
    if (opts_.scales.alpha != 0.0)
      v -= opts_.scales.alpha * opts_.prior->LogProb(label);
    return v;
  }

  double Trans(TransitionClass c) const {
    return use_transitions_
               ? Scaled(opts_.scales.beta, opts_.transitions->LogProb(c))
               : 0.0;
  }

  int LabelOf(const Key &k) const {
    return k.phase == kLabel ? g_.nodes[k.node].label : g_.reserved_label;
  }

  std::vector<std::string> Words(int link) const {
    std::vector<std::string> out;
    for (; link >= 0; link = links_[link].prev)
      out.push_back(g_.words[links_[link].word]);
    std::reverse(out.begin(), out.end());
    return out;
  }

  // Shortlex order of the word chains behind two links: fewer words first,
  // then lexicographic.  Unlike plain lexicographic order it survives
  // appending a common suffix, so recombination cannot change the winner.
  bool Less(int a, int b) const {
    auto wa = Words(a), wb = Words(b);
    if (wa.size() != wb.size()) return wa.size() < wb.size();
    return wa < wb;
  }

  void Relax(std::map<Key, Hyp> *out, const Key &k, double score, int link,
             int t) {
    if (score == kLogZero) return;
    score += Emission(LabelOf(k), t);
    if (score == kLogZero || std::isnan(score)) return;
    auto [it, inserted] = out->try_emplace(k, Hyp{score, link});
    if (inserted) return;
    Hyp &h = it->second;
    if (Tied(score, h.score) ? Less(link, h.link) : score > h.score)
      h = Hyp{score, link};
  }

  int Link(int word, int prev) {
    links_.push_back({word, prev});
    return static_cast<int>(links_.size()) - 1;
  }

  // Enters the first label of the next word from history |hist|; |from|
  // is the label just left (ctc forbids a direct repeat).
  void EnterWords(int hist, double score, int link, int from, TransitionClass c,
                  int t, std::map<Key, Hyp> *out) {
    for (int child : g_.nodes[0].children) {
      if (g_.topology == Topology::kCtc && g_.nodes[child].label == from)
        continue;
      Relax(out, {hist, child, kLabel}, score + Trans(c), link, t);
    }
  }

  void Expand(const Key *k, const Hyp &h, int t, std::map<Key, Hyp> *out) {
    const bool ctc = g_.topology == Topology::kCtc;
    if (!k) {  // non-emitting start
      Relax(out, {0, 0, kGap}, h.score + Trans(TransitionClass::kSilenceForward),
            -1, t);
      EnterWords(0, h.score, -1, -1, TransitionClass::kSpeechForward, t, out);
      return;
    }
    const auto &node = g_.nodes[k->node];
    if (k->phase == kGap) {
      Relax(out, *k,
            h.score + Trans(ctc ? TransitionClass::kBlank
                                : TransitionClass::kSilenceLoop),
            h.link, t);
      if (k->node == 0) {
        EnterWords(k->history, h.score, h.link, -1,
                   TransitionClass::kSilenceForward, t, out);
      } else {  // ctc blank inside a word
        for (int child : node.children)
          Relax(out, {k->history, child, kLabel}, h.score, h.link, t);
      }
      return;
    }
    // Label state.
    Relax(out, *k, h.score + Trans(TransitionClass::kSpeechLoop), h.link, t);
    for (int child : node.children) {
      if (ctc && g_.nodes[child].label == node.label) continue;
      Relax(out, {k->history, child, kLabel},
            h.score + Trans(TransitionClass::kSpeechForward), h.link, t);
    }
    if (ctc && !node.children.empty())
      Relax(out, {k->history, k->node, kGap}, h.score, h.link, t);
    for (int w : node.word_ends) {
      double lm = LmLog(k->history, w);
      if (lm == kLogZero) continue;
      int link = Link(w, h.link);
      double s = h.score + lm;
      Relax(out, {w + 1, 0, kGap},
            s + Trans(TransitionClass::kSpeechForward), link, t);
      EnterWords(w + 1, s, link, node.label, TransitionClass::kSpeechForward, t,
                 out);
    }
  }

  void Prune(std::map<Key, Hyp> *states) const {
    if (std::isinf(opts_.beam) || states->empty()) return;
    double best = kLogZero;
    for (const auto &[k, h] : *states) best = std::max(best, h.score);
    std::erase_if(*states, [&](const auto &kv) {
      return kv.second.score < best - opts_.beam;
    });
  }

  const FrameScores &post_;
  const DecodingGraph &g_;
  const NGramLm &lm_;
  const DecodeOptions &opts_;
  bool use_transitions_ = false;
  std::vector<std::vector<double>> lm_cache_;
  std::vector<WordLink> links_;
};

}  // namespace

DecodingGraph BuildDecodingGraph(const Lexicon &lexicon,
                                 const LabelInventory &inventory) {
  if (lexicon.size() == 0) ConfigError("cannot build a decoding graph from an empty lexicon");
  DecodingGraph g;
  g.topology = inventory.topology();
  g.reserved_label = inventory.ReservedLabel();
  g.num_labels = inventory.NumLabels();
  g.words = lexicon.Words();
  g.nodes.emplace_back();
  std::vector<std::map<int, int>> child_of(1);
  for (std::size_t w = 0; w < g.words.size(); ++w) {
    if (lexicon.Pronunciation(g.words[w]).empty())
      ConfigError("word '" + g.words[w] + "' has an empty pronunciation");
    LabelSequence seq =
        BuildLabelSequence({g.words[w]}, lexicon, inventory, "<lexicon>");
    int node = 0;
    for (int label : seq.labels) {
      auto it = child_of[node].find(label);
      if (it == child_of[node].end()) {
        int id = static_cast<int>(g.nodes.size());
        g.nodes.push_back({label, node, {}, {}});
        child_of.emplace_back();
        child_of[node][label] = id;
        node = id;
      } else {
        node = it->second;
      }
    }
    g.nodes[node].word_ends.push_back(static_cast<int>(w));
  }
  for (std::size_t n = 0; n < g.nodes.size(); ++n)
    for (const auto &[label, id] : child_of[n]) g.nodes[n].children.push_back(id);
  return g;
}

DecodeResult Decode(const FrameScores &posteriors, const DecodingGraph &graph,
                    const NGramLm &lm, const DecodeOptions &options) {
  options.scales.Validate();
  if (!(options.beam > 0)) ConfigError("beam must be positive");
  if (posteriors.NumLabels() != graph.num_labels)
    DataError("posteriors have " + std::to_string(posteriors.NumLabels()) +
              " labels, decoding graph expects " +
              std::to_string(graph.num_labels));
  if (posteriors.NumFrames() < 1) DataError("cannot decode zero frames");
  if (options.scales.alpha != 0.0) {
    if (!options.prior) ConfigError("alpha > 0 requires a prior model");
    if (options.prior->size() != graph.num_labels)
      ConfigError("prior size does not match the label inventory");
  }
  Search search(posteriors, graph, lm, options);
  return search.Run();
}

}  // namespace fullsum
