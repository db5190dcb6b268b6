#include <gtest/gtest.h>

#include <algorithm>
#include <cstring>

#include "steinbound/harness.hpp"

using namespace steinbound;

namespace {

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST(HarnessTest, ZeroCountIsEmpty) { EXPECT_TRUE(dominance_harness(42, 0).empty()); }

TEST(HarnessTest, DeterministicAcrossRuns) {
  for (auto kind : {GeneratorConfig::Kind::Mixed, GeneratorConfig::Kind::Dependent}) {
    GeneratorConfig cfg;
    cfg.kind = kind;
    const auto a = dominance_harness(7, 20, cfg);
    const auto b = dominance_harness(7, 20, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(a[i].descriptor, b[i].descriptor);
      EXPECT_TRUE(same_bits(a[i].exact_tv, b[i].exact_tv));
      EXPECT_TRUE(same_bits(a[i].bound_value, b[i].bound_value));
    }
  }
}

TEST(HarnessTest, InstanceDoesNotDependOnCount) {
  const auto a = dominance_harness(11, 5);
  const auto b = dominance_harness(11, 12);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_TRUE(same_bits(a[i].exact_tv, b[i].exact_tv));
}

TEST(HarnessTest, SeedsGiveDistinctStreams) {
  const auto a = generate_independent(1, 1, {});
  const auto b = generate_independent(2, 0, {});
  EXPECT_NE(a.descriptor.substr(a.descriptor.find(' ')) + std::to_string(moments(independent_law(a.spec)).mean),
            b.descriptor.substr(b.descriptor.find(' ')) + std::to_string(moments(independent_law(b.spec)).mean));
}

TEST(HarnessTest, GeneratorRespectsConfig) {
  GeneratorConfig cfg;
  cfg.max_items = 5;
  cfg.max_weight = 2;
  cfg.max_support = 3;
  for (std::size_t i = 0; i < 100; ++i) {
    const auto g = generate_independent(99, i, cfg);
    ASSERT_GE(g.spec.size(), 1u);
    ASSERT_LE(g.spec.size(), 5u);
    bool unit = false;
    for (const auto& it : g.spec.items()) {
      EXPECT_GE(it.weight, 1u);
      EXPECT_LE(it.weight, 2u);
      EXPECT_GE(it.marginal.size(), 2u);
      EXPECT_LE(it.marginal.size(), 3u);
      unit = unit || it.weight == 1;
    }
    EXPECT_TRUE(unit);
    const auto mo = moments(independent_law(g.spec));
    EXPECT_GE(std::abs(mo.mean - mo.variance), cfg.min_dispersion_gap);
  }
  cfg.kind = GeneratorConfig::Kind::HomogeneousBernoulli;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto g = generate_independent(5, i, cfg);
    for (const auto& it : g.spec.items()) {
      EXPECT_EQ(it.weight, 1u);
      EXPECT_EQ(it.marginal[1], g.spec[0].marginal[1]);
    }
  }
}

TEST(HarnessTest, DependentGeneratorShape) {
  for (std::size_t i = 0; i < 30; ++i) {
    const auto g = generate_dependent(3, i, {});
    const std::size_t n = g.spec.size();
    ASSERT_GE(n, 2u);
    ASSERT_LE(n, 6u);
    EXPECT_TRUE(std::count(g.spec.weights().begin(), g.spec.weights().end(), std::size_t{1}) >= 1);
  }
}

TEST(HarnessTest, SeedFortyTwoHasNoViolations) {
  const auto s = summarize(dominance_harness(42, 200));
  EXPECT_EQ(s.count, 200u);
  EXPECT_EQ(s.violates, 0u);
  EXPECT_GE(s.min_ratio, 1.0);
}

TEST(HarnessTest, HomogeneousBernoulliAllDominate) {
  GeneratorConfig cfg;
  cfg.kind = GeneratorConfig::Kind::HomogeneousBernoulli;
  for (const auto& v : dominance_harness(8, 50, cfg)) {
    EXPECT_EQ(v.status, oracle::Status::Dominates) << v.descriptor;
    EXPECT_LE(v.exact_tv, 1e-13);
  }
}

TEST(HarnessTest, SummaryCounts) {
  std::vector<oracle::Verdict> vs(3);
  vs[0].status = oracle::Status::Dominates;
  vs[0].exact_tv = 0.1;
  vs[0].bound_value = 0.3;
  vs[1].status = oracle::Status::Violates;
  vs[1].exact_tv = 0.2;
  vs[1].bound_value = 0.1;
  vs[2].status = oracle::Status::Inconclusive;
  const auto s = summarize(vs);
  EXPECT_EQ(s.dominates, 1u);
  EXPECT_EQ(s.violates, 1u);
  EXPECT_EQ(s.inconclusive, 1u);
  EXPECT_DOUBLE_EQ(s.min_ratio, 0.5);
}
