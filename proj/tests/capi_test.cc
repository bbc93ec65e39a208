// tests/capi_test.cc
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

// Exercises the shared library through its C header only.

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "fullsum/fullsum.h"
#include "gtest/gtest.h"

namespace {

struct Matrix {
  fs_matrix *m = nullptr;
  Matrix(size_t rows, size_t cols) { EXPECT_EQ(fs_matrix_new(rows, cols, &m), FS_OK); }
  explicit Matrix(fs_matrix *raw) : m(raw) {}
  ~Matrix() { fs_matrix_free(m); }
  double &at(size_t r, size_t c) { return fs_matrix_data(m)[r * fs_matrix_cols(m) + c]; }
};

struct Fsa {
  fs_fsa *f = nullptr;
  ~Fsa() { fs_fsa_free(f); }
};

TEST(CApiTest, VersionAndCommands) {
  EXPECT_STREQ(fs_version(), "0.1.0");
  std::vector<std::string> names;
  for (int i = 0; i < fs_command_count(); ++i) names.push_back(fs_command_name(i));
  for (const char *want : {"train", "align", "decode", "estimate", "tse", "wer",
                           "plot", "synth", "sweep"})
    EXPECT_NE(std::find(names.begin(), names.end(), want), names.end()) << want;
  EXPECT_EQ(fs_command_name(-1), nullptr);
  const char *name = nullptr, *def = nullptr, *help = nullptr;
  int required = -1;
  EXPECT_EQ(fs_command_key(0, 0, &name, &def, &required, &help), FS_OK);
  EXPECT_NE(name, nullptr);
  EXPECT_EQ(fs_command_key(0, 10000, &name, &def, &required, &help), FS_E_USAGE);
}

TEST(CApiTest, StatusCodes) {
  fs_set_logging(0);
  fs_config *cfg = nullptr;
  ASSERT_EQ(fs_config_new(&cfg), FS_OK);
  uint64_t fp = 0;
  EXPECT_EQ(fs_run("no-such-command", cfg, &fp), FS_E_USAGE);
  EXPECT_NE(std::strlen(fs_last_error()), 0u);
  EXPECT_EQ(fs_run("tse", cfg, &fp), FS_E_USAGE);  // missing required keys
  fs_config_set(cfg, "cand", "/nonexistent/a.ali");
  fs_config_set(cfg, "ref", "/nonexistent/b.ali");
  EXPECT_EQ(fs_fingerprint("tse", cfg, &fp), FS_OK);
  EXPECT_EQ(fs_run("tse", cfg, nullptr), FS_E_DATA);
  EXPECT_NE(std::string(fs_last_error()).find("nonexistent"), std::string::npos);
  fs_config_set(cfg, "typo", "1");
  EXPECT_EQ(fs_fingerprint("tse", cfg, &fp), FS_E_USAGE);
  EXPECT_EQ(fs_config_set(cfg, nullptr, "x"), FS_E_USAGE);
  fs_config_free(cfg);
}

TEST(CApiTest, FingerprintIsStableAndSensitive) {
  fs_config *a = nullptr, *b = nullptr;
  fs_config_new(&a);
  fs_config_new(&b);
  for (fs_config *c : {a, b}) {
    fs_config_set(c, "cand", "x.ali");
    fs_config_set(c, "ref", "y.ali");
  }
  uint64_t fa = 0, fb = 0;
  fs_fingerprint("tse", a, &fa);
  fs_fingerprint("tse", b, &fb);
  EXPECT_EQ(fa, fb);
  fs_config_set(b, "bin-ms", "20");
  fs_fingerprint("tse", b, &fb);
  EXPECT_NE(fa, fb);
  fs_config_free(a);
  fs_config_free(b);
}

TEST(CApiTest, LatticePrimitives) {
  // One label over three frames at probability 0.5: a single path.
  const int labels[] = {0};
  Fsa fsa;
  ASSERT_EQ(fs_fsa_new(FS_TOPOLOGY_HMM, labels, 1, -1, 1, &fsa.f), FS_OK);
  Matrix s(3, 2);
  for (int t = 0; t < 3; ++t)
    for (int l = 0; l < 2; ++l) s.at(t, l) = std::log(0.5);
  double total = 0;
  ASSERT_EQ(fs_forward_score(fsa.f, s.m, &total), FS_OK);
  EXPECT_NEAR(total, std::log(0.125), 1e-12);

  // CTC over [0 1] with blank 2.
  const int ab[] = {0, 1};
  Fsa ctc;
  ASSERT_EQ(fs_fsa_new(FS_TOPOLOGY_CTC, ab, 2, 2, 1, &ctc.f), FS_OK);
  EXPECT_EQ(fs_fsa_min_frames(ctc.f), 2);
  Matrix x(4, 3);
  std::mt19937 rng(3);
  std::normal_distribution<double> n;
  for (int t = 0; t < 4; ++t)
    for (int l = 0; l < 3; ++l) x.at(t, l) = n(rng);
  fs_matrix *occ = nullptr;
  ASSERT_EQ(fs_occupation(ctc.f, x.m, &occ), FS_OK);
  Matrix q(occ);
  for (int t = 0; t < 4; ++t)
    EXPECT_NEAR(q.at(t, 0) + q.at(t, 1) + q.at(t, 2), 1.0, 1e-12);
  int path[4];
  double best = 0;
  ASSERT_EQ(fs_viterbi(ctc.f, x.m, path, &best), FS_OK);
  double check = 0;
  for (int t = 0; t < 4; ++t) check += x.at(t, path[t]);
  EXPECT_NEAR(best, check, 1e-12);
  double ctc_total = 0;
  ASSERT_EQ(fs_forward_score(ctc.f, x.m, &ctc_total), FS_OK);
  EXPECT_LE(best, ctc_total);

  fs_matrix *pooled = nullptr;
  ASSERT_EQ(fs_subsample(x.m, 3, &pooled), FS_OK);
  Matrix p(pooled);
  EXPECT_EQ(fs_matrix_rows(p.m), 2u);

  Fsa bad;
  EXPECT_EQ(fs_fsa_new(FS_TOPOLOGY_CTC, ab, 2, 2, 0, &bad.f), FS_E_USAGE);
  Matrix too_short(1, 3);
  EXPECT_EQ(fs_viterbi(ctc.f, too_short.m, path, &best), FS_E_DATA);
}

TEST(CApiTest, LossGradientMatchesFiniteDifferences) {
  const int labels[] = {0, 1};
  Fsa fsa;
  ASSERT_EQ(fs_fsa_new(FS_TOPOLOGY_HMM, labels, 2, 2, 1, &fsa.f), FS_OK);
  const double transitions[] = {0.875, 0.125, 0.9, 0.1};
  const double prior[] = {0.3, 0.3, 0.4};
  fs_model_spec spec{FS_VARIANT_H_HMM, 0.3, 0.5, 0.8, transitions, prior, 3};
  Matrix logits(5, 3);
  std::mt19937 rng(11);
  std::normal_distribution<double> n;
  for (int t = 0; t < 5; ++t)
    for (int l = 0; l < 3; ++l) logits.at(t, l) = n(rng);
  auto loss_at = [&](const Matrix &z) {
    Matrix lp(5, 3);
    for (int t = 0; t < 5; ++t) {
      double m = -1e300, s = 0;
      for (int l = 0; l < 3; ++l) m = std::max(m, fs_matrix_const_data(z.m)[t * 3 + l]);
      for (int l = 0; l < 3; ++l) s += std::exp(fs_matrix_const_data(z.m)[t * 3 + l] - m);
      for (int l = 0; l < 3; ++l)
        lp.at(t, l) = fs_matrix_const_data(z.m)[t * 3 + l] - m - std::log(s);
    }
    double v = 0;
    EXPECT_EQ(fs_loss(&spec, fsa.f, lp.m, &v, nullptr), FS_OK);
    return v;
  };
  Matrix lp(5, 3);
  {
    // Log-softmax of the logits.
    for (int t = 0; t < 5; ++t) {
      double s = 0;
      for (int l = 0; l < 3; ++l) s += std::exp(logits.at(t, l));
      for (int l = 0; l < 3; ++l) lp.at(t, l) = logits.at(t, l) - std::log(s);
    }
  }
  double loss = 0;
  fs_matrix *grad = nullptr;
  ASSERT_EQ(fs_loss(&spec, fsa.f, lp.m, &loss, &grad), FS_OK);
  Matrix g(grad);
  EXPECT_NEAR(loss, loss_at(logits), 1e-12);
  const double h = 1e-5;
  for (int t = 0; t < 5; ++t)
    for (int l = 0; l < 3; ++l) {
      double x0 = logits.at(t, l);
      logits.at(t, l) = x0 + h;
      double up = loss_at(logits);
      logits.at(t, l) = x0 - h;
      double down = loss_at(logits);
      logits.at(t, l) = x0;
      EXPECT_NEAR(g.at(t, l), (up - down) / (2 * h), 1e-6);
    }

  fs_model_spec no_prior = spec;
  no_prior.prior = nullptr;
  double v = 0;
  EXPECT_EQ(fs_loss(&no_prior, fsa.f, lp.m, &v, nullptr), FS_E_USAGE);
}

}  // namespace
