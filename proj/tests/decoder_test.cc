// tests/decoder_test.cc
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

#include "gtest/gtest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "decoder_oracle.h"

namespace fullsum {
namespace {

Lexicon MakeLexicon(const std::vector<std::string> &phonemes,
                    const std::string &text) {
  std::istringstream in(text);
  return Lexicon::Parse(in, phonemes);
}

TEST(DecodingGraphTest, SharesPrefixes) {
  Lexicon lex = MakeLexicon({"AH", "N"}, "a\tAH\nan\tAH N\n");
  LabelInventory inv({"AH", "N"}, false, 1, Topology::kHmm01);
  DecodingGraph g = BuildDecodingGraph(lex, inv);
  ASSERT_EQ(g.nodes.size(), 3u);
  ASSERT_EQ(g.nodes[0].children.size(), 1u);
  const auto &ah = g.nodes[g.nodes[0].children[0]];
  EXPECT_EQ(ah.label, inv.PhonemeId("AH") * 1);
  EXPECT_EQ(ah.word_ends, std::vector<int>{0});  // "a"
  ASSERT_EQ(ah.children.size(), 1u);
  EXPECT_EQ(g.nodes[ah.children[0]].word_ends, std::vector<int>{1});  // "an"
}

TEST(DecodingGraphTest, RejectsEmptyLexicon) {
  LabelInventory inv({"A"}, false, 1, Topology::kHmm01);
  EXPECT_THROW(BuildDecodingGraph(Lexicon({"A"}), inv), Error);
}

NGramLm UniformLm(const std::vector<std::string> &words) {
  return NGramLm::Estimate({}, words, 1);
}

// Single word [A, A] under ctc needs a blank between the two labels.
TEST(DecoderTest, CtcRepeatNeedsBlank) {
  Lexicon lex = MakeLexicon({"A"}, "aa\tA A\n");
  LabelInventory inv({"A"}, false, 1, Topology::kCtc);
  DecodingGraph g = BuildDecodingGraph(lex, inv);
  NGramLm lm = UniformLm({"aa"});
  FrameScores post;
  post.scores = Matrix::Constant(2, 2, std::log(0.5));
  DecodeOptions opts;
  EXPECT_THROW(Decode(post, g, lm, opts), Error);  // AA collapses to [A]
  post.scores = Matrix::Constant(3, 2, std::log(0.5));
  DecodeResult r = Decode(post, g, lm, opts);
  EXPECT_EQ(r.words, std::vector<std::string>{"aa"});
  // Only A blank A: 3 frames at log 0.5, then P(aa|<s>) P(</s>|aa).
  EXPECT_NEAR(r.score,
              3 * std::log(0.5) + lm.LogProb("<s>", "aa") +
                  lm.LogProb("aa", "</s>"),
              1e-12);
}

TEST(DecoderTest, AcousticsDominateWithoutLm) {
  Lexicon lex = MakeLexicon({"A", "B", "C"}, "one\tA B\ntwo\tC\n");
  LabelInventory inv({"A", "B", "C"}, false, 1, Topology::kHmm01);
  DecodingGraph g = BuildDecodingGraph(lex, inv);
  NGramLm lm = NGramLm::Estimate({{"two"}, {"two"}, {"two"}}, {"one", "two"});
  FrameScores post;
  post.scores = Matrix::Constant(4, 4, std::log(0.01));
  for (int t = 0; t < 4; ++t) post.scores(t, t < 2 ? 0 : 1) = std::log(0.97);
  DecodeOptions opts;
  opts.scales.lambda = 0.0;
  EXPECT_EQ(Decode(post, g, lm, opts).words, std::vector<std::string>{"one"});
}

TEST(DecoderTest, LanguageModelDominatesUniformPosteriors) {
  Lexicon lex = MakeLexicon({"A", "B"}, "x\tA\ny\tB\n");
  LabelInventory inv({"A", "B"}, false, 1, Topology::kHmm01);
  DecodingGraph g = BuildDecodingGraph(lex, inv);
  NGramLm lm = NGramLm::Estimate({{"y"}, {"y"}, {"y"}, {"x", "y"}}, {"x", "y"});
  FrameScores post;
  post.scores = Matrix::Constant(5, 3, std::log(1.0 / 3));
  DecodeOptions opts;
  opts.scales.lambda = 50.0;
  EXPECT_EQ(Decode(post, g, lm, opts).words, std::vector<std::string>{"y"});
}

TEST(DecoderTest, ZeroScalesIgnoreTables) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    oracle::MicroInstance m = oracle::RandomMicroInstance(rng);
    m.scales.alpha = 0.0;
    m.scales.beta = 0.0;
    DecodingGraph g = BuildDecodingGraph(m.lexicon, m.inventory);
    DecodeOptions with = m.Options();
    DecodeOptions without = with;
    without.prior = nullptr;
    without.transitions = nullptr;
    DecodeResult a = Decode(m.posteriors, g, m.lm, with);
    DecodeResult b = Decode(m.posteriors, g, m.lm, without);
    EXPECT_EQ(a.words, b.words);
    EXPECT_EQ(a.score, b.score);
  }
}

TEST(DecoderTest, MissingPriorIsConfigError) {
  Lexicon lex = MakeLexicon({"A"}, "a\tA\n");
  LabelInventory inv({"A"}, false, 1, Topology::kHmm01);
  DecodingGraph g = BuildDecodingGraph(lex, inv);
  FrameScores post;
  post.scores = Matrix::Constant(2, 2, std::log(0.5));
  DecodeOptions opts;
  opts.scales.alpha = 0.3;
  EXPECT_THROW(Decode(post, g, UniformLm({"a"}), opts), Error);
}

TEST(DecoderTest, MatchesExhaustiveSearch) {
  std::mt19937 rng(2026);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    oracle::MicroInstance m = oracle::RandomMicroInstance(rng);
    DecodingGraph g = BuildDecodingGraph(m.lexicon, m.inventory);
    oracle::OracleResult want = oracle::BruteForceDecode(m);
    if (!want.found) {
      EXPECT_THROW(Decode(m.posteriors, g, m.lm, m.Options()), Error);
      continue;
    }
    DecodeResult got = Decode(m.posteriors, g, m.lm, m.Options());
    EXPECT_EQ(got.words, want.words) << "trial " << trial;
    EXPECT_NEAR(got.score, want.score, 1e-9) << "trial " << trial;
    ++checked;
  }
  EXPECT_GT(checked, 80);
}

TEST(DecoderTest, BeamMonotonicity) {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    oracle::MicroInstance m = oracle::RandomMicroInstance(rng);
    DecodingGraph g = BuildDecodingGraph(m.lexicon, m.inventory);
    double prev = -std::numeric_limits<double>::infinity();
    for (double beam : {0.5, 1.0, 2.0, 4.0, 8.0, 1e9}) {
      DecodeOptions o = m.Options();
      o.beam = beam;
      double score = -std::numeric_limits<double>::infinity();
      try {
        score = Decode(m.posteriors, g, m.lm, o).score;
      } catch (const Error &) {
      }
      EXPECT_GE(score, prev - 1e-12);
      prev = score;
    }
  }
}

}  // namespace
}  // namespace fullsum
