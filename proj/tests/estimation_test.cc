// tests/estimation_test.cc
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

#include "fullsum/estimation.h"

#include <numeric>
#include <random>
#include <sstream>

#include "gtest/gtest.h"

namespace fullsum {
namespace {

Lexicon ToyLexicon() {
  std::istringstream in(
      "ab\tA B\n"
      "abc\tA B C\n"
      "cab\tC A B\n");
  return Lexicon::Parse(in, {"A", "B", "C"});
}

TEST(PApproxTransitionsTest, EightyMsAtTenMs) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  TransitionModel tm = PApproxTransitions({80, 10, 1e-4}, {}, lex, inv);
  EXPECT_EQ(tm.speech_loop, 7.0 / 8);
  EXPECT_EQ(tm.speech_forward, 1.0 / 8);
  EXPECT_EQ(tm.speech_loop + tm.speech_forward, 1.0);
  EXPECT_EQ(tm.silence_loop + tm.silence_forward, 1.0);
}

TEST(PApproxTransitionsTest, OneFramePhonemes) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  TransitionModel tm = PApproxTransitions({10, 10, 1e-4}, {}, lex, inv);
  EXPECT_EQ(tm.speech_loop, 0.0);
  EXPECT_EQ(tm.speech_forward, 1.0);
}

TEST(PApproxTransitionsTest, ThreeStatePhonemesSplitDuration) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 3, Topology::kHmm01);
  TransitionModel tm = PApproxTransitions({80, 10, 1e-4}, {}, lex, inv);
  EXPECT_DOUBLE_EQ(tm.speech_loop, 1.0 - 3.0 / 8);
}

TEST(PApproxTransitionsTest, SilenceFromResidualAudio) {
  // Six phonemes at 100 ms cover 60 of 100 frames: 40 silence frames in two
  // segments of 20 give a silence loop of 19/20.
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 1000.0, {"abc", "cab"}}};
  TransitionModel tm = PApproxTransitions({100, 10, 1e-4}, corpus, lex, inv);
  EXPECT_DOUBLE_EQ(tm.silence_loop, 19.0 / 20);
  EXPECT_DOUBLE_EQ(tm.speech_loop, 0.9);
}

TEST(PApproxTransitionsTest, NoSilenceFallsBackToSpeech) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 160.0, {"ab"}}};
  TransitionModel tm = PApproxTransitions({80, 10, 1e-4}, corpus, lex, inv);
  EXPECT_EQ(tm.silence_loop, tm.speech_loop);
}

TEST(PApproxTransitionsTest, RejectsShortPhonemes) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  EXPECT_THROW(PApproxTransitions({5, 10, 1e-4}, {}, lex, inv), Error);
}

TEST(PApproxPriorTest, NoResidual) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 160.0, {"ab"}}};
  auto m = PApproxPriorMasses({80, 10, 0.0}, corpus, lex, inv);
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], 0.5);
  EXPECT_DOUBLE_EQ(m[2], 0.0);
  EXPECT_DOUBLE_EQ(m[inv.ReservedLabel()], 0.0);
}

TEST(PApproxPriorTest, ResidualBecomesSilence) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 320.0, {"ab"}}};
  auto m = PApproxPriorMasses({80, 10, 0.0}, corpus, lex, inv);
  EXPECT_DOUBLE_EQ(m[0], 0.25);
  EXPECT_DOUBLE_EQ(m[1], 0.25);
  EXPECT_DOUBLE_EQ(m[inv.ReservedLabel()], 0.5);
}

TEST(PApproxPriorTest, FloorAppliesToEmptySilence) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 240.0, {"abc"}}};
  PriorModel prior = PApproxPrior({80, 10, 1e-4}, corpus, lex, inv);
  EXPECT_NEAR(prior.probs()[inv.ReservedLabel()], 1e-4, 1e-15);
  double sum = std::accumulate(prior.probs().begin(), prior.probs().end(), 0.0);
  EXPECT_NEAR(sum, 1.0, 1e-12);
}

TEST(PApproxPriorTest, OverlongTranscriptClampsSilence) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"short", 100.0, {"abc"}}};
  auto m = PApproxPriorMasses({80, 10, 0.0}, corpus, lex, inv);
  EXPECT_DOUBLE_EQ(m[inv.ReservedLabel()], 0.0);
}

TEST(PApproxPriorTest, EowAndStatesShareMass) {
  Lexicon lex = ToyLexicon();
  LabelInventory inv(lex.phonemes(), true, 3, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 240.0, {"ab"}}};
  auto m = PApproxPriorMasses({80, 10, 0.0}, corpus, lex, inv);
  double speech = 0;
  for (int l = 0; l < inv.NumSpeech(); ++l) speech += m[l];
  EXPECT_NEAR(speech, 16.0 / 24, 1e-12);
  LabelUnit b_end{LabelUnit::Kind::kPhoneme, 1, true, 2};
  EXPECT_NEAR(m[inv.Index(b_end)], (8.0 / 3) / 24, 1e-12);
}

// Relabelling the phoneme inventory permutes the prior accordingly.
TEST(PApproxPriorTest, PermutationEquivariant) {
  std::istringstream in1("x\tA B B\ny\tC A\n");
  std::istringstream in2("x\tB C C\ny\tA B\n");  // A->B, B->C, C->A
  Lexicon l1 = Lexicon::Parse(in1, {"A", "B", "C"});
  Lexicon l2 = Lexicon::Parse(in2, {"A", "B", "C"});
  LabelInventory inv({"A", "B", "C"}, false, 1, Topology::kHmm01);
  std::vector<CorpusEntry> corpus{{"u1", 500.0, {"x", "y"}}, {"u2", 300, {"y"}}};
  auto m1 = PApproxPriorMasses({80, 10, 0.0}, corpus, l1, inv);
  auto m2 = PApproxPriorMasses({80, 10, 0.0}, corpus, l2, inv);
  EXPECT_DOUBLE_EQ(m1[0], m2[1]);
  EXPECT_DOUBLE_EQ(m1[1], m2[2]);
  EXPECT_DOUBLE_EQ(m1[2], m2[0]);
  EXPECT_DOUBLE_EQ(m1[3], m2[3]);
  EXPECT_NEAR(std::accumulate(m1.begin(), m1.end(), 0.0), 1.0, 1e-9);
}

FrameScores LogRows(const Matrix &probs) {
  FrameScores s;
  s.scores = probs.array().log();
  return s;
}

TEST(MarginalPriorTest, OneHotFrame) {
  Matrix p = Matrix::Zero(1, 3);
  p(0, 1) = 1.0;
  PriorModel prior = MarginalPrior({LogRows(p)}, 1e-4);
  EXPECT_NEAR(prior.probs()[0], 1e-4, 1e-15);
  EXPECT_NEAR(prior.probs()[1], 1.0 - 2e-4, 1e-15);
}

TEST(MarginalPriorTest, UniformFrames) {
  Matrix p = Matrix::Constant(2, 4, 0.25);
  PriorModel prior = MarginalPrior({LogRows(p)}, 1e-4);
  for (double v : prior.probs()) EXPECT_NEAR(v, 0.25, 1e-15);
}

TEST(MarginalPriorTest, KnownMixture) {
  // 3 frames of row r1 and 1 frame of r2: prior = 0.75 r1 + 0.25 r2.
  Vector r1(3), r2(3);
  r1 << 0.7, 0.2, 0.1;
  r2 << 0.1, 0.1, 0.8;
  Matrix p(4, 3);
  p.row(0) = p.row(1) = p.row(2) = r1.transpose();
  p.row(3) = r2.transpose();
  PriorModel prior = MarginalPrior({LogRows(p)}, 1e-4);
  Vector expected = 0.75 * r1 + 0.25 * r2;
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(prior.probs()[i], expected(i), 1e-12);
}

TEST(MarginalPriorTest, ConcatenationIsFrameWeightedMean) {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  auto random_batch = [&](int T) {
    Matrix p(T, 4);
    for (int t = 0; t < T; ++t) {
      for (int l = 0; l < 4; ++l) p(t, l) = u(rng);
      p.row(t) /= p.row(t).sum();
    }
    return LogRows(p);
  };
  FrameScores a = random_batch(3), b = random_batch(7);
  MarginalPriorAccumulator both, only_a, only_b;
  both.Add(a);
  both.Add(b);
  only_a.Add(a);
  only_b.Add(b);
  auto m = both.Mean(), ma = only_a.Mean(), mb = only_b.Mean();
  for (int l = 0; l < 4; ++l)
    EXPECT_NEAR(m[l], (3 * ma[l] + 7 * mb[l]) / 10, 1e-12);
  EXPECT_THROW(MarginalPriorAccumulator().Mean(), Error);
}

TEST(CorpusMetadataTest, Parse) {
  std::istringstream in("# c\nu1\t1000\tab cab\nu2\t50.5\tab\n");
  auto c = ParseCorpusMetadata(in);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[0].words, (std::vector<std::string>{"ab", "cab"}));
  EXPECT_DOUBLE_EQ(c[1].duration_ms, 50.5);
  std::istringstream bad("u1 1000 ab\n");
  EXPECT_THROW(ParseCorpusMetadata(bad), Error);
}

}  // namespace
}  // namespace fullsum
