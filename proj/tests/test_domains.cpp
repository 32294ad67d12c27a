#include <gtest/gtest.h>

#include <cmath>

#include "ro/domains.hpp"

using namespace ro;
using namespace ro::domains;

namespace {
std::vector<std::uint16_t> all_dice(unsigned n, std::uint16_t v) { return std::vector<std::uint16_t>(n, v); }
}  // namespace

TEST(Grid, NeighborsAreOrthogonal) {
  EXPECT_EQ(neighbors(3, 4), (std::vector<unsigned>{1, 3, 5, 7}));
  EXPECT_EQ(neighbors(3, 0), (std::vector<unsigned>{1, 3}));
  EXPECT_EQ(neighbors(3, 8), (std::vector<unsigned>{5, 7}));
  EXPECT_TRUE(neighbors(1, 0).empty());
}

TEST(Grid, ParseAndFormatRoundTrip) {
  Sway s(3, 1);
  auto c = parse_grid(s, ". B W\nW . .\n. . B\n");
  EXPECT_EQ(c, (Config{0, 1, 2, 2, 0, 0, 0, 0, 1}));
  EXPECT_EQ(parse_grid(s, format_grid(s, c)), c);
  Sir e(2, 1, 1);
  EXPECT_EQ(parse_grid(e, "SI\nRS"), (Config{0, 1, 2, 0}));
  EXPECT_THROW(parse_grid(e, "SX\nRS"), std::invalid_argument);
  EXPECT_THROW(parse_grid(e, "SSS\nSSS\nSSS"), std::invalid_argument);
  EXPECT_THROW(parse_grid(e, "SS\nS"), std::invalid_argument);
}

TEST(SwayRound, FirstValidCellAndSentinel) {
  Sway s(3, 1);
  auto c = sway_round(s, s.initial_config(), 0, 15, all_dice(9, 19));
  Config want(9, 0);
  want[0] = 1;
  EXPECT_EQ(c, want);
  // White takes the first cell still empty after black's placement.
  auto c2 = sway_round(s, s.initial_config(), 0, 0, all_dice(9, 19));
  EXPECT_EQ(c2[0], 1);
  EXPECT_EQ(c2[1], 2);
}

TEST(SwayRound, FullBoardIsNoOp) {
  Sway s(2, 1);
  Config full{1, 1, 1, 1};  // every cell has k = 2 same-colour neighbours
  EXPECT_EQ(sway_round(s, full, 0, 1, all_dice(4, 2)), full);
  EXPECT_EQ(sway_round(s, full, 3, 0, all_dice(4, 19)), full);
}

TEST(SwayRound, IsolatedPieceFlipTable) {
  Sway s(3, 1);
  Config c(9, 0);
  c[4] = 1;
  for (unsigned die = 0; die < 20; ++die) EXPECT_EQ(s.cell_next(c, 4, die), die < 4 ? 2 : 1) << die;
  auto d = s.cell_dist(c, 4);
  ASSERT_EQ(d.n, 2u);
  EXPECT_EQ(d.state[0], 2);
  EXPECT_EQ(d.faces[0], 4u);
}

TEST(SwayRound, FlipFrequencyMatchesTable) {
  Sway s(3, 1);
  Rng rng(99);
  for (unsigned k = 0; k <= 4; ++k) {
    Config c(9, 0);
    c[4] = 2;
    const unsigned nb[4] = {1, 3, 5, 7};
    for (unsigned i = 0; i < 4; ++i) c[nb[i]] = i < k ? 2 : 1;
    ASSERT_EQ(s.same_colour(c, 4), k);
    const int trials = 20000;
    int flips = 0;
    for (int t = 0; t < trials; ++t) flips += s.cell_next(c, 4, static_cast<unsigned>(rng.below(20))) == 1;
    const double p = (4.0 - k) / 20.0;
    const double sigma = std::sqrt(p * (1 - p) / trials);
    EXPECT_LE(std::abs(flips / double(trials) - p), 3 * sigma + 1e-12) << "k=" << k;
  }
}

TEST(SirRound, RuleTable) {
  Sir e(3, 1, 2, 2);
  Config none(9, 0);
  auto c = sir_round(e, none, 4, all_dice(9, 0));
  Config want(9, 0);
  want[4] = 2;
  EXPECT_EQ(c, want);  // no infection anywhere: only the vaccination acts

  Config ring(9, 0);
  for (unsigned n : {1u, 3u, 5u, 7u}) ring[n] = 1;
  EXPECT_EQ(e.cell_next(ring, 4, 3), 1);  // c = 4, die 3 < 4
  EXPECT_EQ(e.cell_next(ring, 4, 4), 0);
  EXPECT_EQ(e.cell_next(ring, 1, 5), 1);  // infected, rho = 2, die 5 stays
  EXPECT_EQ(e.cell_next(ring, 1, 1), 2);
  Config rec(9, 2);
  for (unsigned d = 0; d < 8; ++d) EXPECT_EQ(e.cell_next(rec, 0, d), 2);
}

TEST(SirRound, VaccinationPrecedesSpread) {
  Sir e(3, 1, 2, 0);
  auto c0 = e.initial_config();
  // selector 1 picks cell 1 (second susceptible cell), which is adjacent to the centre
  auto c = sir_round(e, c0, 1, all_dice(9, 0));
  EXPECT_EQ(c[1], 2);
  EXPECT_EQ(c[3], 1);
  EXPECT_EQ(c[0], 0);
}

TEST(Rollout, HorizonZeroAndStreamChecks) {
  Sir e(3, 0, 0);
  auto t = classical_rollout(e, e.initial_config(), {}, {});
  EXPECT_FALSE(t.payoff);  // one infected cell > T = 0
  Sir e1(3, 0, 1);
  EXPECT_TRUE(classical_rollout(e1, e1.initial_config(), {}, {}).payoff);
  Sir e2(3, 1, 1);
  std::vector<std::uint64_t> sel{0};
  EXPECT_THROW(classical_rollout(e2, e2.initial_config(), sel, all_dice(8, 0)), std::invalid_argument);
  EXPECT_THROW(classical_rollout(e2, e2.initial_config(), sel, all_dice(9, 8)), std::invalid_argument);
}

TEST(Rollout, SentinelSelectorsWithMaxDiceOnTwoByTwo) {
  // 2x2 SIR with the infected cell at index 3; dice 7 never infect (c <= 2) and never recover (rho 2).
  Sir e(2, 3, 1, 2);
  const auto init = e.initial_config();
  EXPECT_EQ(init, (Config{0, 0, 0, 1}));
  std::vector<std::uint64_t> sel(3, 7);
  auto t = classical_rollout(e, init, sel, all_dice(12, 7));
  for (const auto& b : t.boards) EXPECT_EQ(b, init);
  for (auto p : t.picks) EXPECT_EQ(p, 4u);
  EXPECT_TRUE(t.payoff);
  Sway s(2, 2);
  std::vector<std::uint64_t> ssel(4, 7);
  auto ts = classical_rollout(s, s.initial_config(), ssel, all_dice(8, 19));
  EXPECT_EQ(ts.boards.back(), Config(4, 0));
  EXPECT_FALSE(ts.payoff);
}

TEST(Kernel, ClosedFormMatchesFaceEnumeration) {
  Rng rng(5);
  Sway s(4, 1);
  Sir e(4, 1, 3, 3);
  for (int t = 0; t < 300; ++t) {
    Config c(16);
    for (auto& x : c) x = static_cast<std::uint8_t>(rng.below(3));
    for (unsigned j = 0; j < 16; ++j) {
      for (const RolloutSpec* sp : {static_cast<const RolloutSpec*>(&s), static_cast<const RolloutSpec*>(&e)}) {
        auto a = sp->cell_dist(c, j);
        auto b = cell_distribution(*sp, c, j);
        ASSERT_EQ(a.n, b.n);
        for (unsigned k = 0; k < a.n; ++k) {
          // order may differ
          unsigned m = a.state[k] == b.state[0] ? 0 : 1;
          EXPECT_EQ(a.state[k], b.state[m]);
          EXPECT_EQ(a.faces[k], b.faces[m]);
        }
      }
    }
  }
}

namespace {
// Exhaustive expectation over every selector value and every die face on a single round.
double brute_force_one_round(const RolloutSpec& sp, const Config& init) {
  const unsigned N = sp.cells(), S = sp.selectors_per_round(), D = sp.dice_faces();
  const std::uint64_t sel_range = std::uint64_t{1} << sp.width();
  std::uint64_t combos_sel = 1;
  for (unsigned k = 0; k < S; ++k) combos_sel *= sel_range;
  std::uint64_t combos_dice = 1;
  for (unsigned j = 0; j < N; ++j) combos_dice *= D;
  std::uint64_t hits = 0;
  std::vector<std::uint64_t> sel(S);
  std::vector<std::uint16_t> dice(N);
  for (std::uint64_t a = 0; a < combos_sel; ++a) {
    auto x = a;
    for (unsigned k = 0; k < S; ++k, x /= sel_range) sel[k] = x % sel_range;
    for (std::uint64_t b = 0; b < combos_dice; ++b) {
      auto y = b;
      for (unsigned j = 0; j < N; ++j, y /= D) dice[j] = static_cast<std::uint16_t>(y % D);
      hits += sp.payoff(play_round(sp, init, sel, dice));
    }
  }
  return static_cast<double>(hits) / static_cast<double>(combos_sel * combos_dice);
}
}  // namespace

TEST(ExactValue, MatchesBruteForceOnTwoByTwo) {
  Sir e(2, 1, 1, 3);
  EXPECT_NEAR(exact_value(e, e.initial_config()), brute_force_one_round(e, e.initial_config()), 1e-12);
  Sir e2(2, 1, 0, 2);
  Config c{1, 0, 0, 1};
  EXPECT_NEAR(exact_value(e2, c), brute_force_one_round(e2, c), 1e-12);
  Sway s(2, 1);
  Config b{1, 0, 2, 0};
  EXPECT_NEAR(exact_value(s, b), brute_force_one_round(s, b), 1e-12);
}

TEST(ExactValue, HorizonZeroIsIndicator) {
  Sir e(3, 0, 1);
  EXPECT_EQ(exact_value(e, e.initial_config()), 1.0);
  Sway s(3, 0);
  EXPECT_EQ(exact_value(s, s.initial_config()), 0.0);
}

TEST(ExactValue, BudgetIsEnforced) {
  Sir e(3, 3, 2);
  EXPECT_THROW(exact_value(e, e.initial_config(), {}, 10), std::runtime_error);
}

TEST(ExactValue, SirMonotoneInThresholdAndRho) {
  double prev = -1;
  for (unsigned T = 0; T <= 9; ++T) {
    Sir e(3, 2, T, 2);
    const double v = exact_value(e, e.initial_config());
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  prev = -1;
  for (unsigned rho = 0; rho <= 8; ++rho) {
    Sir e(3, 2, 2, rho);
    const double v = exact_value(e, e.initial_config());
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
}

TEST(ExactValue, MonteCarloAgrees) {
  Sway s(3, 2);
  const double ex = exact_value(s, s.initial_config());
  auto mc = mc_value(s, s.initial_config(), 20000, 11);
  EXPECT_LE(mc.ci_lo, ex);
  EXPECT_GE(mc.ci_hi, ex);
  auto again = mc_value(s, s.initial_config(), 20000, 11);
  EXPECT_EQ(again.hits, mc.hits);
}

TEST(ArmMeans, SymmetryAndNeighbourVersusCorner) {
  Sir e(3, 2, 2, 2);
  auto mu = arm_means(e, e.initial_config(), 8);
  // Valid cells in order: 0 1 2 3 5 6 7 8, so arms 0,2,5,7 are corners and 1,3,4,6 are neighbours.
  for (unsigned a : {2u, 5u, 7u}) EXPECT_NEAR(mu[a], mu[0], 1e-12);
  for (unsigned a : {3u, 4u, 6u}) EXPECT_NEAR(mu[a], mu[1], 1e-12);
  EXPECT_GE(mu[1], mu[0]);
  for (unsigned a : {0u, 1u}) {
    // Two arms are checked, so use a 3.5 sigma band rather than the 95% interval.
    const std::uint64_t n = 20000;
    auto mc = mc_value(e, e.initial_config(), n, 3 + a, a);
    EXPECT_NEAR(mc.p, mu[a], 3.5 * std::sqrt(mu[a] * (1 - mu[a]) / n));
  }
}

TEST(ArmMeans, OutOfRangeArmIsNoAction) {
  Sir e(2, 1, 1);
  // 3 susceptible cells; arm 3 selects nothing, same as a forced sentinel.
  const double v = exact_value(e, e.initial_config(), 3);
  std::vector<std::uint64_t> sel{0};
  double acc = 0;
  for (unsigned a = 0; a < 8 * 8 * 8 * 8; ++a) {
    std::vector<std::uint16_t> d{static_cast<std::uint16_t>(a % 8), static_cast<std::uint16_t>(a / 8 % 8),
                                 static_cast<std::uint16_t>(a / 64 % 8), static_cast<std::uint16_t>(a / 512)};
    acc += classical_rollout(e, e.initial_config(), sel, d, 3).payoff;
  }
  EXPECT_NEAR(v, acc / 4096.0, 1e-12);
}
