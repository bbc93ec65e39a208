// tests/lattice_test.cc
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

#include "fullsum/lattice.h"

#include <random>

#include "gtest/gtest.h"
#include "oracle.h"

namespace fullsum {
namespace {

constexpr int kA = 0, kB = 1, kR = 2;

FrameScores Uniform(int T, int L, double p) {
  FrameScores s;
  s.scores = Matrix::Constant(T, L, std::log(p));
  return s;
}

FrameScores RandomScores(std::mt19937 &rng, int T, int L) {
  std::normal_distribution<double> n(0.0, 1.5);
  FrameScores s;
  s.scores.resize(T, L);
  for (int t = 0; t < T; ++t)
    for (int l = 0; l < L; ++l) s.scores(t, l) = n(rng);
  return s;
}

double PathScore(const oracle::Path &p, const FrameScores &s) {
  double v = 0.0;
  for (std::size_t t = 0; t < p.labels.size(); ++t)
    v += s.scores(static_cast<int>(t), p.labels[t]);
  return v;
}

TEST(ForwardScoreTest, SinglePath) {
  AlignmentFsa fsa = BuildHmmFsa(LabelSequence::FromLabels({kA}), std::nullopt);
  EXPECT_NEAR(ForwardScore(fsa, Uniform(3, 3, 0.5)), std::log(0.125), 1e-12);
}

TEST(ForwardScoreTest, TwoPaths) {
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt);
  EXPECT_NEAR(ForwardScore(fsa, Uniform(3, 3, 1.0 / 3)),
              std::log(2.0 * std::pow(1.0 / 3, 3)), 1e-12);
}

TEST(ForwardScoreTest, EmptyLanguageIsLogZero) {
  AlignmentFsa fsa = ApplyMinDuration(
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt), 2);
  EXPECT_EQ(ForwardScore(fsa, Uniform(3, 3, 1.0 / 3)), kLogZero);
}

TEST(ForwardScoreTest, RejectsInvalidRows) {
  AlignmentFsa fsa = BuildHmmFsa(LabelSequence::FromLabels({kA}), std::nullopt);
  FrameScores s = Uniform(2, 3, 0.5);
  s.scores.row(1).setConstant(kLogZero);
  EXPECT_THROW(ForwardScore(fsa, s), Error);
  s.scores(1, 0) = std::nan("");
  EXPECT_THROW(ForwardScore(fsa, s), Error);
  FrameScores narrow = Uniform(2, 1, 0.5);
  AlignmentFsa wide = BuildHmmFsa(LabelSequence::FromLabels({kB}), std::nullopt);
  EXPECT_THROW(ForwardScore(wide, narrow), Error);
}

TEST(OccupationTest, SinglePathIsOneHot) {
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB, kA}), std::nullopt);
  SoftAlignment q = OccupationProbabilities(fsa, Uniform(3, 3, 0.2));
  Matrix expected = Matrix::Zero(3, 3);
  expected(0, kA) = expected(1, kB) = expected(2, kA) = 1.0;
  EXPECT_LT((q.occupation - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OccupationTest, SymmetricTwoPaths) {
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt);
  SoftAlignment q = OccupationProbabilities(fsa, Uniform(3, 3, 1.0 / 3));
  EXPECT_NEAR(q.occupation(1, kA), 0.5, 1e-12);
  EXPECT_NEAR(q.occupation(1, kB), 0.5, 1e-12);
  EXPECT_NEAR(q.occupation(0, kA), 1.0, 1e-12);
}

TEST(OccupationTest, EmptyLanguageThrows) {
  AlignmentFsa fsa = ApplyMinDuration(
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt), 2);
  try {
    OccupationProbabilities(fsa, Uniform(3, 3, 0.3));
    FAIL();
  } catch (const Error &e) {
    EXPECT_NE(std::string(e.what()).find("no alignment path"), std::string::npos);
  }
}

TEST(ViterbiTest, SinglePathEqualsForward) {
  AlignmentFsa fsa = BuildCtcFsa(LabelSequence::FromLabels({kA, kA}), kR);
  std::mt19937 rng(5);
  FrameScores s = RandomScores(rng, 3, 3);
  ViterbiResult v = Viterbi(fsa, s);
  EXPECT_NEAR(v.score, ForwardScore(fsa, s), 1e-12);
  EXPECT_EQ(v.alignment.labels, (std::vector<int>{kA, kR, kA}));
}

TEST(ViterbiTest, PrefersBetterFrame) {
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt);
  FrameScores s = Uniform(3, 3, 0.5);
  s.scores(1, kA) = std::log(0.9);
  s.scores(1, kB) = std::log(0.1);
  ViterbiResult v = Viterbi(fsa, s);
  EXPECT_EQ(v.alignment.labels, (std::vector<int>{kA, kA, kB}));
  ASSERT_EQ(v.alignment.segments.size(), 2u);
  EXPECT_EQ(v.alignment.segments[0].end, 2);
}

TEST(ViterbiTest, TiesPreferForwardArcs) {
  // Uniform scores: AAB and ABB tie.  Into B at the last frame the forward
  // arc beats B's loop, so A keeps the first two frames.
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt);
  ViterbiResult v = Viterbi(fsa, Uniform(3, 3, 0.5));
  EXPECT_EQ(v.alignment.labels, (std::vector<int>{kA, kA, kB}));
}

TEST(ViterbiTest, EmptyLanguageThrows) {
  AlignmentFsa fsa = BuildCtcFsa(LabelSequence::FromLabels({kA, kA}), kR);
  EXPECT_THROW(Viterbi(fsa, Uniform(2, 3, 0.5)), Error);
}

TEST(ViterbiTest, WordSegmentsSkipSilence) {
  LabelSequence seq = LabelSequence::FromLabels({kA, kB}, {1, 2});
  seq.words = {"x", "y"};
  AlignmentFsa fsa = BuildHmmFsa(seq, kR);
  FrameScores s = Uniform(6, 3, 0.01);
  // R A A R B R
  const int path[] = {kR, kA, kA, kR, kB, kR};
  for (int t = 0; t < 6; ++t) s.scores(t, path[t]) = 0.0;
  ViterbiResult v = Viterbi(fsa, s);
  ASSERT_EQ(v.alignment.words.size(), 2u);
  EXPECT_EQ(v.alignment.words[0].word, "x");
  EXPECT_EQ(v.alignment.words[0].start, 1);
  EXPECT_EQ(v.alignment.words[0].end, 3);
  EXPECT_EQ(v.alignment.words[1].start, 4);
  EXPECT_EQ(v.alignment.words[1].end, 5);
  EXPECT_EQ(v.alignment.segments.size(), 5u);
  int covered = 0;
  for (const Segment &seg : v.alignment.segments) covered += seg.end - seg.start;
  EXPECT_EQ(covered, 6);
}

TEST(SubsampleTest, Shapes) {
  std::mt19937 rng(3);
  FrameScores s = RandomScores(rng, 8, 4);
  FrameScores same = SubsampleScores(s, 1);
  EXPECT_EQ(same.scores, s.scores);
  EXPECT_EQ(SubsampleScores(s, 4).NumFrames(), 2);
  EXPECT_DOUBLE_EQ(SubsampleScores(s, 4).frame_shift_ms, 40.0);
  FrameScores five = RandomScores(rng, 5, 4);
  FrameScores two = SubsampleScores(five, 2);
  ASSERT_EQ(two.NumFrames(), 3);
  EXPECT_EQ(two.scores.row(2), five.scores.row(4));
  EXPECT_DOUBLE_EQ(two.scores(0, 1), std::max(five.scores(0, 1), five.scores(1, 1)));
  EXPECT_THROW(SubsampleScores(s, 0), Error);
}

// Forward score, occupation and Viterbi against exhaustive path enumeration
// for both topologies and MinDur k = 1..3.
TEST(LatticePropertyTest, MatchesBruteForce) {
  std::mt19937 rng(42);
  const int kSpeech = 3, kReserved = 3, L = 4;
  for (int trial = 0; trial < 40; ++trial) {
    int S = 1 + static_cast<int>(rng() % 3);
    std::vector<int> labels(S);
    for (int &l : labels) l = static_cast<int>(rng() % kSpeech);
    std::vector<std::size_t> ends;
    for (int s = 1; s < S; ++s)
      if (rng() % 2) ends.push_back(s);
    ends.push_back(S);
    LabelSequence seq = LabelSequence::FromLabels(labels, ends);
    int k = 1 + static_cast<int>(rng() % 3);
    int T = 1 + static_cast<int>(rng() % 7);
    FrameScores s = RandomScores(rng, T, L);
    for (int topo = 0; topo < 2; ++topo) {
      AlignmentFsa fsa = ApplyMinDuration(
          topo == 0 ? BuildCtcFsa(seq, kReserved) : BuildHmmFsa(seq, kReserved), k);
      auto paths = topo == 0 ? oracle::CtcPaths(labels, kReserved, L, T, k)
                             : oracle::HmmPaths(labels, ends, kReserved, T, k);
      std::vector<double> scores;
      for (const auto &p : paths) scores.push_back(PathScore(p, s));
      double expected = oracle::LogSumExp(scores);
      double got = ForwardScore(fsa, s);
      if (paths.empty()) {
        EXPECT_EQ(got, kLogZero);
        EXPECT_THROW(Viterbi(fsa, s), Error);
        continue;
      }
      EXPECT_NEAR(got, expected, 1e-10 * std::max(1.0, std::abs(expected)));
      ForwardBackward fb = RunForwardBackward(fsa, s);
      EXPECT_NEAR(fb.log_total, got, 1e-12 * std::max(1.0, std::abs(got)));
      // Posterior consistency at every frame.
      for (int t = 1; t <= T; ++t) {
        std::vector<double> ab;
        for (int st = 0; st < fsa.NumStates(); ++st)
          ab.push_back(fb.alpha(t, st) + fb.beta(t, st));
        EXPECT_NEAR(oracle::LogSumExp(ab), got,
                    1e-10 * std::max(1.0, std::abs(got)));
      }
      // Occupation from brute force.
      Matrix q = Matrix::Zero(T, L);
      for (std::size_t i = 0; i < paths.size(); ++i)
        for (int t = 0; t < T; ++t)
          q(t, paths[i].labels[t]) += std::exp(scores[i] - expected);
      SoftAlignment soft = OccupationProbabilities(fsa, s);
      EXPECT_LT((soft.occupation - q).cwiseAbs().maxCoeff(), 1e-10);
      for (int t = 0; t < T; ++t)
        EXPECT_NEAR(soft.occupation.row(t).sum(), 1.0, 1e-9);
      // Viterbi.
      std::size_t arg = 0;
      for (std::size_t i = 1; i < paths.size(); ++i)
        if (scores[i] > scores[arg]) arg = i;
      ViterbiResult v = Viterbi(fsa, s);
      EXPECT_NEAR(v.score, scores[arg], 1e-10);
      EXPECT_EQ(v.alignment.labels, paths[arg].labels);
      EXPECT_LE(v.score, got + 1e-12);
    }
  }
}

TEST(LatticePropertyTest, MinDurationNeverIncreasesScore) {
  std::mt19937 rng(9);
  LabelSequence seq = LabelSequence::FromLabels({0, 1, 0}, {2, 3});
  for (int trial = 0; trial < 20; ++trial) {
    FrameScores s = RandomScores(rng, 9, 4);
    Matrix logp = s.scores;
    for (int t = 0; t < 9; ++t) {  // normalise to log-probabilities
      double m = oracle::LogSumExp({logp(t, 0), logp(t, 1), logp(t, 2), logp(t, 3)});
      s.scores.row(t).array() -= m;
    }
    for (int topo = 0; topo < 2; ++topo) {
      AlignmentFsa base = topo ? BuildHmmFsa(seq, 3) : BuildCtcFsa(seq, 3);
      double prev = ForwardScore(base, s);
      for (int k = 2; k <= 3; ++k) {
        double cur = ForwardScore(ApplyMinDuration(base, k), s);
        EXPECT_LE(cur, prev + 1e-12);
        prev = cur;
      }
    }
  }
}

TEST(ExpandAlignmentTest, ScalesFramesAndShift) {
  AlignmentFsa fsa =
      BuildHmmFsa(LabelSequence::FromLabels({kA, kB}), std::nullopt);
  FrameScores s = Uniform(3, 3, 0.5);
  s.frame_shift_ms = 40;
  HardAlignment h = Viterbi(fsa, s).alignment;
  HardAlignment e = ExpandAlignment(h, 4);
  EXPECT_EQ(e.NumFrames(), 12);
  EXPECT_DOUBLE_EQ(e.frame_shift_ms, 10.0);
  EXPECT_EQ(e.words.at(0).end, h.words.at(0).end * 4);
}

}  // namespace
}  // namespace fullsum
