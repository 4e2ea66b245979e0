// Copyright 2026 The semdec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "semdec/affinity.hpp"
#include "support.hpp"

namespace semdec {
namespace {

using testing::four_term_mi;

// Stats for two words w, v from the four cell counts.
CooccurrenceStats pair_stats(std::uint64_t both, std::uint64_t only_w, std::uint64_t only_v,
                             std::uint64_t neither) {
  return CooccurrenceStats::from_counts(5, both + only_w + only_v + neither,
                                        {{"w", both + only_w}, {"v", both + only_v}},
                                        {{{"v", "w"}, both}});
}

TEST(ImAvg, IndependentPairIsZero) {
  EXPECT_NEAR(im_avg(pair_stats(1, 1, 1, 1), "w", "v").bits, 0.0, 1e-12);
  EXPECT_NEAR(im_avg(pair_stats(6, 2, 3, 1), "w", "v").bits, 0.0, 1e-12);
}

TEST(ImAvg, PerfectlyCorrelatedPairIsOneBit) {
  EXPECT_NEAR(im_avg(pair_stats(1, 0, 0, 1), "w", "v").bits, 1.0, 1e-12);
}

TEST(ImAvg, DegenerateAndEmpty) {
  auto s = pair_stats(1, 0, 0, 1);
  auto d = im_avg(s, "p", "q");
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.bits, 0.0);
  EXPECT_FALSE(im_avg(s, "w", "q").degenerate);
  EXPECT_THROW(im_avg(CooccurrenceStats{}, "w", "v"), std::invalid_argument);
}

TEST(ImAvgProperty, MatchesFourTermOracleAndIsSymmetric) {
  std::mt19937_64 rng(31);
  std::uniform_int_distribution<std::uint64_t> cell(0, 20);
  for (int trial = 0; trial < 1000; ++trial) {
    std::uint64_t a = cell(rng), b = cell(rng), c = cell(rng), d = cell(rng);
    if (a + b + c + d == 0) continue;
    auto s = pair_stats(a, b, c, d);
    const double n = static_cast<double>(a + b + c + d);
    double want = four_term_mi(a / n, b / n, c / n, d / n);
    double got = im_avg(s, "w", "v").bits;
    EXPECT_NEAR(got, want, 1e-12);
    EXPECT_GE(got, 0.0);
    EXPECT_EQ(got, im_avg(s, "v", "w").bits);
  }
}

TEST(ImAvgProperty, ZeroExactlyWhenFactorized) {
  std::mt19937_64 rng(32);
  std::uniform_int_distribution<std::uint64_t> m(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    // Outer product of two count vectors factorizes by construction.
    std::uint64_t x1 = m(rng), x0 = m(rng), y1 = m(rng), y0 = m(rng);
    auto s = pair_stats(x1 * y1, x1 * y0, x0 * y1, x0 * y0);
    EXPECT_NEAR(im_avg(s, "w", "v").bits, 0.0, 1e-12);
    auto t = pair_stats(x1 * y1 + 1, x1 * y0, x0 * y1, x0 * y0);
    EXPECT_GT(im_avg(t, "w", "v").bits, 1e-12);
  }
}

TEST(ImPointwise, Cases) {
  EXPECT_NEAR(im_pointwise(pair_stats(1, 1, 1, 1), "w", "v"), 0.0, 1e-12);
  // v always occurs with w, P(v) = 0.5.
  EXPECT_NEAR(im_pointwise(pair_stats(2, 0, 0, 2), "w", "v"), 1.0, 1e-12);
  double none = im_pointwise(pair_stats(0, 2, 2, 0), "w", "v");
  EXPECT_TRUE(std::isinf(none) && none < 0);
  EXPECT_THROW(im_pointwise(pair_stats(0, 2, 0, 2), "w", "v"), std::invalid_argument);
}

TEST(CooccurrenceStats, WindowCounts) {
  CooccurrenceStats s(1);
  s.add_utterance({"a", "b", "a", "c"});
  // Windows: {a} {a,b} {a,b} {a,c}
  EXPECT_EQ(s.total(), 4u);
  EXPECT_EQ(s.count("a"), 4u);
  EXPECT_EQ(s.count("b"), 2u);
  EXPECT_EQ(s.count("c"), 1u);
  EXPECT_EQ(s.joint("a", "b"), 2u);
  EXPECT_EQ(s.joint("b", "a"), 2u);
  EXPECT_EQ(s.joint("b", "c"), 0u);
}

TEST(CooccurrenceStatsProperty, CellsFormADistribution) {
  std::mt19937_64 rng(33);
  std::uniform_int_distribution<int> pick(0, 5), len(1, 8), win(1, 4);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  for (int trial = 0; trial < 100; ++trial) {
    CooccurrenceStats s(static_cast<std::size_t>(win(rng)));
    for (int u = 0; u < 5; ++u) {
      std::vector<std::string> utt;
      for (int i = len(rng); i > 0; --i) utt.push_back(vocab[static_cast<std::size_t>(pick(rng))]);
      s.add_utterance(utt);
    }
    for (const auto& w : vocab) {
      for (const auto& v : vocab) {
        auto t = s.table(w, v);
        EXPECT_NEAR(t.sum(), 1.0, 1e-9);
        for (double p : {t.both, t.only_w, t.only_v, t.neither}) {
          EXPECT_GE(p, 0.0);
          EXPECT_LE(p, 1.0);
        }
        EXPECT_LE(s.joint(w, v), std::min(s.count(w), s.count(v)));
        EXPECT_NEAR(s.table(w, v, 0.5).sum(), 1.0, 1e-9);
      }
    }
  }
}

TEST(SelectMax, PicksLargestAndLaterOnTies) {
  std::vector<double> one{0.4};
  EXPECT_EQ(select_max(one), 0u);
  std::vector<double> s{0.1, 0.7, 0.3};
  EXPECT_EQ(select_max(s), 1u);
  std::vector<double> tie{0.5, 0.2, 0.5};
  EXPECT_EQ(select_max(tie), 2u);
  EXPECT_THROW(select_max(std::vector<double>{}), std::invalid_argument);
}

// Target t; candidates c0..c2 with different association strengths.
CooccurrenceStats graded_stats() {
  CooccurrenceStats s(1);
  for (int i = 0; i < 2; ++i) s.add_utterance({"c1", "t"});
  s.add_utterance({"c2", "t"});
  s.add_utterance({"c0", "t"});
  for (int i = 0; i < 2; ++i) s.add_utterance({"c0", "x"});
  for (int i = 0; i < 4; ++i) s.add_utterance({"x", "y"});
  return s;
}

TEST(MaxAffinity, AgreesWithExhaustiveScan) {
  auto stats = graded_stats();
  AffinityScorer scorer{&stats, 0.5};
  std::vector<std::string> cands{"c0", "c1", "c2"};
  double best = -1;
  std::size_t arg = 0;
  for (std::size_t j = 0; j < cands.size(); ++j) {
    auto t = stats.table("t", cands[j]);
    double sc = four_term_mi(t.both, t.only_w, t.only_v, t.neither);
    if (sc >= best) {
      best = sc;
      arg = j;
    }
  }
  auto got = max_affinity(scorer, "t", cands);
  EXPECT_EQ(got.position, arg);
  EXPECT_EQ(arg, 1u);
  EXPECT_NEAR(got.score, best, 1e-12);
  EXPECT_EQ(max_affinity(scorer, "t", std::vector<std::string>{"c2"}).position, 0u);
}

TEST(MaxAffinity, EqualScoresPreferNearerCandidate) {
  auto stats = graded_stats();
  AffinityScorer scorer{&stats, 0.5};
  EXPECT_EQ(max_affinity(scorer, "t", std::vector<std::string>{"c1", "c1"}).position, 1u);
}

TEST(MaxAffinityProperty, InvariantUnderMonotoneTransforms) {
  std::mt19937_64 rng(34);
  std::uniform_int_distribution<int> len(1, 10);
  std::uniform_int_distribution<int> coarse(0, 4);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> s;
    for (int i = len(rng); i > 0; --i) s.push_back(coarse(rng) * 0.25);
    auto winner = select_max(s);
    for (auto f : {+[](double x) { return std::exp(x); }, +[](double x) { return 3 * x + 1; },
                   +[](double x) { return std::atan(x); }}) {
      std::vector<double> t;
      for (double x : s) t.push_back(f(x));
      EXPECT_EQ(select_max(t), winner);
    }
  }
}

std::vector<LabeledWord> labeled(std::initializer_list<const char*> surfaces) {
  std::vector<LabeledWord> out;
  for (const char* s : surfaces) out.push_back({s, std::string("C_") + s, std::string("T_") + s});
  return out;
}

TEST(PertinentContext, EmptyPrefixIsBegin) {
  auto stats = graded_stats();
  auto ctx = pertinent_context({&stats, 0.5}, {}, "t");
  EXPECT_EQ(ctx.cp1, kBegin);
  EXPECT_EQ(ctx.cp2, kBegin);
  EXPECT_EQ(ctx.fsep_class, kBegin);
  EXPECT_EQ(ctx.fsep_trait, kBegin);
  EXPECT_TRUE(ctx.sources.empty());
}

TEST(PertinentContext, SingleWordPrefix) {
  auto stats = graded_stats();
  auto prefix = labeled({"c0"});
  auto ctx = pertinent_context({&stats, 0.5}, prefix, "t");
  EXPECT_EQ(ctx.cp1, "C_c0");
  EXPECT_EQ(ctx.fsep_trait, "T_c0");
  EXPECT_EQ(ctx.cp2, kBegin);
}

TEST(PertinentContext, ThreeWordPrefixRanksByAffinity) {
  auto stats = graded_stats();
  AffinityScorer scorer{&stats, 0.5};
  // word #1 = c2, word #2 = c1 (strongest), word #3 = c0.
  auto prefix = labeled({"c2", "c1", "c0"});
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t j = 0; j < prefix.size(); ++j) {
    auto t = stats.table("t", prefix[j].surface);
    ranked.push_back({four_term_mi(t.both, t.only_w, t.only_v, t.neither), j});
  }
  std::sort(ranked.rbegin(), ranked.rend());
  ASSERT_EQ(ranked[0].second, 1u);
  ASSERT_EQ(ranked[1].second, 0u);
  auto ctx = pertinent_context(scorer, prefix, "t");
  EXPECT_EQ(ctx.cp1, "C_c1");
  EXPECT_EQ(ctx.cp2, "C_c2");
  EXPECT_EQ(ctx.fsep_class, "C_c1");
  EXPECT_EQ(ctx.fsep_trait, "T_c1");
  EXPECT_EQ(ctx.sources, (std::vector<std::size_t>{1, 0}));
}

TEST(PertinentContextProperty, TopSourceIsMaxAffinityWinner) {
  std::mt19937_64 rng(35);
  std::uniform_int_distribution<int> pick(0, 5), len(1, 7);
  const std::vector<std::string> vocab = {"a", "b", "c", "d", "e", "f"};
  CooccurrenceStats stats(3);
  for (int u = 0; u < 40; ++u) {
    std::vector<std::string> utt;
    for (int i = len(rng); i > 0; --i) utt.push_back(vocab[static_cast<std::size_t>(pick(rng))]);
    stats.add_utterance(utt);
  }
  AffinityScorer scorer{&stats, 0.5};
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<LabeledWord> prefix;
    std::vector<std::string> surfaces;
    for (int i = len(rng); i > 0; --i) {
      auto w = vocab[static_cast<std::size_t>(pick(rng))];
      prefix.push_back({w, "C" + w, "T" + w});
      surfaces.push_back(w);
    }
    auto target = vocab[static_cast<std::size_t>(pick(rng))];
    auto ctx = pertinent_context(scorer, prefix, target);
    auto win = max_affinity(scorer, target, surfaces);
    ASSERT_FALSE(ctx.sources.empty());
    EXPECT_EQ(ctx.sources[0], win.position);
    EXPECT_EQ(ctx.fsep_class, ctx.cp1);
    if (ctx.sources.size() == 2) EXPECT_NE(ctx.sources[0], ctx.sources[1]);
  }
}

TEST(FixedContext, LiteralPreviousWords) {
  auto prefix = labeled({"a", "b", "c"});
  auto one = fixed_context(prefix, 1);
  EXPECT_EQ(one.cp1, "C_c");
  EXPECT_EQ(one.cp2, kBegin);
  EXPECT_EQ(one.fsep_trait, "T_c");
  auto two = fixed_context(prefix, 2);
  EXPECT_EQ(two.cp1, "C_c");
  EXPECT_EQ(two.cp2, "C_b");
  EXPECT_EQ(fixed_context({}, 2), PertinentContext{});
}

}  // namespace
}  // namespace semdec
