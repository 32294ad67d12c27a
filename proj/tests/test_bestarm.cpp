#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ro/bestarm.hpp"

using namespace ro::bestarm;

TEST(Kl, ReferenceValues) {
  EXPECT_EQ(kl(0.3, 0.3), 0.0);
  EXPECT_NEAR(kl(1.0 / 3, 2.0 / 3), std::log(2.0) / 3, 1e-12);
  EXPECT_NEAR(kl(1.0 / 3, 2.0 / 3), 0.23105, 1e-5);
  // Asymmetric in general.
  EXPECT_GT(std::abs(kl(0.1, 0.5) - kl(0.5, 0.1)), 0.1);
  EXPECT_EQ(kl(0.5, 0.0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(kl(0.5, 1.0), std::numeric_limits<double>::infinity());
  EXPECT_EQ(kl(1.0, 1.0), 0.0);
  EXPECT_NEAR(kl(1.0, 0.5), std::log(2.0), 1e-12);
  EXPECT_THROW(kl(1.2, 0.5), std::invalid_argument);
}

TEST(Kl, DenominatorBoundOnSweep) {
  for (int i = 1; i <= 500; ++i) {
    const double e = 0.05 * i / 500;
    EXPECT_LE(kl(0.5, 0.5 + 6 * e), 96 * e * e) << e;
    EXPECT_GE(kl(0.5, 0.5 + 6 * e), 0.0);
  }
}

TEST(LowerBound, WorkedValuesAndMonotonicity) {
  EXPECT_NEAR(classical_lower_bound(10, 0.1), 9 * 0.6931471805599453 / 2.88, 1e-9);
  EXPECT_NEAR(classical_lower_bound(10, 0.1), 2.166085, 1e-6);
  EXPECT_NEAR(classical_lower_bound(2, 0.05), 0.9627, 1e-4);
  EXPECT_LT(classical_lower_bound(5, 0.05), classical_lower_bound(6, 0.05));
  EXPECT_GT(classical_lower_bound(5, 0.04), classical_lower_bound(5, 0.05));
  EXPECT_THROW(classical_lower_bound(1, 0.05), std::invalid_argument);
  EXPECT_THROW(classical_lower_bound(4, 0.0), std::invalid_argument);
  EXPECT_THROW(classical_lower_bound(4, 0.2), std::invalid_argument);
}

TEST(HardInstance, BaseAndAlternative) {
  auto b = hard_instance(5, 0.05);
  EXPECT_DOUBLE_EQ(b.means[0], 0.7);
  for (unsigned i = 1; i < 5; ++i) EXPECT_DOUBLE_EQ(b.means[i], 0.5);
  EXPECT_EQ(b.best(), 0u);
  EXPECT_FALSE(b.clipped);
  auto a = hard_instance(5, 0.05, 3);
  EXPECT_DOUBLE_EQ(a.means[3], 0.8);
  EXPECT_DOUBLE_EQ(a.means[0], 0.7);
  EXPECT_EQ(a.best(), 3u);
  EXPECT_TRUE(hard_instance(4, 0.2).clipped);
  EXPECT_FALSE(hard_instance(4, 0.1).clipped);
  EXPECT_TRUE(hard_instance(4, 0.1, 1).clipped);
  EXPECT_THROW(hard_instance(4, 0.05, 0), std::invalid_argument);
  EXPECT_THROW(hard_instance(4, 0.05, 4), std::invalid_argument);
}

TEST(ClassicalBaseline, SingleArmNeedsNoPulls) {
  auto led = classical_baseline(hard_instance(1, 0.1), 0.1, 3);
  EXPECT_EQ(led.oracle_calls, 0u);
  EXPECT_EQ(led.chosen, 0u);
  EXPECT_TRUE(led.correct);
}

TEST(ClassicalBaseline, CorrectAndAboveTheLowerBound) {
  auto inst = hard_instance(10, 0.1);
  unsigned ok = 0;
  double total = 0;
  const unsigned trials = 200;
  for (unsigned t = 0; t < trials; ++t) {
    auto led = classical_baseline(inst, 0.1, 1000 + t);
    ok += led.correct;
    total += static_cast<double>(led.oracle_calls);
    std::uint64_t sum = 0;
    for (auto p : led.pulls) sum += p;
    ASSERT_EQ(sum, led.oracle_calls);
  }
  EXPECT_GE(ok, 2 * trials / 3);
  EXPECT_GE(total / trials, classical_lower_bound(10, 0.1));
}

TEST(ClassicalBaseline, DeterministicLedger) {
  auto inst = hard_instance(8, 0.05);
  auto a = classical_baseline(inst, 0.05, 99), b = classical_baseline(inst, 0.05, 99);
  EXPECT_EQ(a.pulls, b.pulls);
  EXPECT_EQ(a.chosen, b.chosen);
  auto c = classical_baseline(inst, 0.05, 100);
  EXPECT_NE(a.pulls, c.pulls);
}

TEST(QuantumAccounting, SingleArmIsOneEstimation) {
  QuantumConstants qc;
  auto led = quantum_accounting(hard_instance(1, 0.1), 0.1, 1, qc);
  EXPECT_EQ(led.comparisons, 1u);
  EXPECT_EQ(led.oracle_calls, static_cast<std::uint64_t>(std::ceil(qc.c_ae / 0.1)));
  EXPECT_EQ(led.oracle_calls, 32u);
}

TEST(QuantumAccounting, CorrectWithinBudgetAndDeterministic) {
  auto inst = hard_instance(10, 0.1);
  QuantumConstants qc;
  const auto budget = static_cast<std::uint64_t>(std::ceil(qc.c_dh * std::sqrt(10.0) + qc.c_log * std::pow(std::log2(10.0), 2)));
  unsigned ok = 0;
  for (unsigned t = 0; t < 200; ++t) {
    auto led = quantum_accounting(inst, 0.1, 500 + t);
    ok += led.correct;
    EXPECT_LE(led.comparisons, budget);
    EXPECT_EQ(led.oracle_calls, led.comparisons * 32u);
  }
  EXPECT_GE(ok, 134u);
  auto a = quantum_accounting(inst, 0.1, 7), b = quantum_accounting(inst, 0.1, 7);
  EXPECT_EQ(a.oracle_calls, b.oracle_calls);
  EXPECT_EQ(a.chosen, b.chosen);
}

TEST(LeastSquares, RecoversPlantedCoefficients) {
  std::vector<double> x1, x2, y;
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 4; ++j) {
      x1.push_back(i);
      x2.push_back(j * j);
      y.push_back(3 + 0.5 * i - 2 * j * j);
    }
  auto b = least_squares({x1, x2}, y);
  ASSERT_EQ(b.size(), 2u);
  EXPECT_NEAR(b[0], 0.5, 1e-10);
  EXPECT_NEAR(b[1], -2, 1e-10);
  EXPECT_THROW(least_squares({x1, x1}, y), std::invalid_argument);
}

TEST(Separation, SinglePointIsOneRow) {
  auto rep = separation_report({8}, {0.1}, 10, 5);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].k, 8u);
  EXPECT_TRUE(rep.rows[0].valid);
  EXPECT_GE(rep.rows[0].classical_mean, rep.rows[0].lower_bound);
  EXPECT_EQ(rep.slopes.classical_k, 0.0);
  EXPECT_THROW(separation_report({}, {0.1}, 10, 5), std::invalid_argument);
}

TEST(Separation, ClippedRowsAreFlaggedAndLeftOutOfFits) {
  auto rep = separation_report({4, 8}, {0.2, 0.1, 0.05}, 20, 5);
  ASSERT_EQ(rep.rows.size(), 6u);
  EXPECT_FALSE(rep.rows[0].valid);
  EXPECT_TRUE(std::isnan(rep.rows[0].lower_bound));
  EXPECT_EQ(rep.slopes.rows_used, 4u);
}

TEST(Separation, ScalingAndCrossoverOnAReducedGrid) {
  auto rep = separation_report({4, 8, 16, 32, 64}, {0.1, 0.05, 0.025}, 40, 11);
  const auto& s = rep.slopes;
  EXPECT_GE(s.classical_k, 0.85);
  EXPECT_LE(s.classical_k, 1.15);
  EXPECT_GE(s.quantum_k, 0.35);
  EXPECT_LE(s.quantum_k, 0.65);
  EXPECT_GE(s.classical_inv_eps, 1.8);
  EXPECT_LE(s.classical_inv_eps, 2.2);
  EXPECT_GE(s.quantum_inv_eps, 0.85);
  EXPECT_LE(s.quantum_inv_eps, 1.15);
  for (const auto& r : rep.rows) {
    EXPECT_GE(r.classical_mean, r.lower_bound) << r.k << " " << r.eps;
    if (r.k >= 16 && r.eps == 0.05) EXPECT_LT(r.quantum_mean, r.classical_mean) << r.k;
  }
}

TEST(Transport, PerArmPullsExceedTheRatio) {
  auto r = transport_check(10, 0.05, 100, 3);
  EXPECT_NEAR(r.ratio, std::log(2.0) / 3 / kl(0.5, 0.8), 1e-12);
  ASSERT_EQ(r.arms.size(), 9u);
  EXPECT_TRUE(r.ok);
  // Above 1/12 the alternative is not a distribution; the ratio degenerates to zero.
  EXPECT_EQ(transport_check(4, 0.1, 10, 3).ratio, 0.0);
}
