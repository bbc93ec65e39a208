// tests/ngram_test.cc
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
#include <sstream>

#include "fullsum/common.h"
#include "gtest/gtest.h"

namespace fullsum {
namespace {

NGramLm Toy() {
  return NGramLm::Estimate({{"a", "b"}, {"a"}, {"b", "b", "c"}},
                           {"a", "b", "c", "d"});
}

TEST(NGramTest, EstimateIsNormalised) {
  NGramLm lm = Toy();
  EXPECT_EQ(lm.order(), 2);
  EXPECT_LT(lm.MaxNormalizationError(), 1e-12);
  EXPECT_TRUE(std::isinf(lm.LogProb("a", "<s>")));
  EXPECT_TRUE(std::isinf(lm.LogProb("a", "zzz")));
  // Seen bigram: (count - D) / history count.
  EXPECT_NEAR(lm.LogProb("<s>", "a"), std::log((2 - 0.5) / 3), 1e-12);
}

TEST(NGramTest, ArpaRoundTrip) {
  NGramLm lm = Toy();
  std::istringstream in(lm.ToArpa());
  NGramLm r = NGramLm::ParseArpa(in);
  EXPECT_LT(r.MaxNormalizationError(), 1e-6);
  for (const auto &h : {"<s>", "a", "b", "c", "d"})
    for (const auto &w : {"a", "b", "c", "d", "</s>"})
      EXPECT_NEAR(r.LogProb(h, w), lm.LogProb(h, w), 1e-9) << h << " " << w;
  EXPECT_NEAR(r.SentenceLogProb({"a", "b"}), lm.SentenceLogProb({"a", "b"}),
              1e-9);
}

TEST(NGramTest, ParsesHandWrittenArpa) {
  std::istringstream in(
      "\\data\\\nngram 1=3\nngram 2=1\n\n\\1-grams:\n"
      "-0.30103 </s>\n-99 <s> -0.30103\n-0.30103 x -0.30103\n\n"
      "\\2-grams:\n-0.30103 <s> x\n\n\\end\\\n");
  NGramLm lm = NGramLm::ParseArpa(in);
  EXPECT_NEAR(lm.LogProb("<s>", "x"), std::log(0.5), 1e-5);
  // Backoff: P(</s>|<s>) = bow(<s>) * P(</s>) = 0.5 * 0.5.
  EXPECT_NEAR(lm.LogProb("<s>", "</s>"), std::log(0.25), 1e-5);
}

TEST(NGramTest, RejectsHigherOrders) {
  std::istringstream in(
      "\\data\\\nngram 1=1\nngram 3=1\n\n\\1-grams:\n-1 a\n\n\\end\\\n");
  EXPECT_THROW(NGramLm::ParseArpa(in), Error);
  std::istringstream missing_end("\\data\\\nngram 1=1\n\\1-grams:\n-1 a\n");
  EXPECT_THROW(NGramLm::ParseArpa(missing_end), Error);
}

TEST(NGramTest, UnigramModel) {
  NGramLm lm = NGramLm::Estimate({{"a"}}, {"a", "b"}, 1);
  EXPECT_EQ(lm.order(), 1);
  EXPECT_EQ(lm.LogProb("a", "b"), lm.LogProb("<s>", "b"));
  EXPECT_LT(lm.MaxNormalizationError(), 1e-12);
}

}  // namespace
}  // namespace fullsum
