#include <gtest/gtest.h>

#include <cmath>

#include "ro/emulator.hpp"
#include "ro/rank_select.hpp"

using namespace ro;

TEST(Emulator, XFlipsTheTarget) {
  auto c = Circuit::build({{"q", 3, Role::ancilla, 0}}, {Gate{{}, {0}}});
  BasisState b(3);
  EXPECT_EQ(apply(c, b).to_string(), "100");
}

TEST(Emulator, NegativeControlFiresOnZero) {
  auto c = Circuit::build({{"q", 3, Role::ancilla, 0}}, {Gate{{{0, false}, {1, true}}, {2}}});
  BasisState b(3);
  b.set(1, true);
  EXPECT_EQ(apply(c, b).to_string(), "011");
  b.set(0, true);
  EXPECT_EQ(apply(c, b).to_string(), "110");
}

TEST(Emulator, MultiWordStatesAndRun64Agree) {
  Builder b;
  auto q = b.add_register("q", 64, Role::ancilla);
  b.mcx({Control{q[0], true}, Control{q[63], false}}, q[31]);
  b.cx(q[31], q[62]);
  auto c = std::move(b).finish();
  Program p(c);
  for (std::uint64_t v : {0ull, 1ull, 0x8000000000000001ull, 0x123456789abcdefull}) {
    BasisState s(64);
    s.words()[0] = v;
    p.run(s);
    EXPECT_EQ(s.words()[0], p.run64(v));
  }
  Builder b2;
  auto r = b2.add_register("r", 130, Role::ancilla);
  b2.cx(r[0], r[129]);
  auto c2 = std::move(b2).finish();
  BasisState s(130);
  s.set(0, true);
  EXPECT_TRUE(apply(c2, s).get(129));
}

TEST(Emulator, ReadWriteLittleEndian) {
  BasisState s(10);
  std::vector<Qubit> qs{2, 3, 4};
  s.write(qs, 5);
  EXPECT_EQ(s.read(qs), 5u);
  EXPECT_TRUE(s.get(2));
  EXPECT_FALSE(s.get(3));
  EXPECT_TRUE(s.get(4));
}

TEST(Emulator, SingleValidCellWritesItsIndex) {
  // A lone valid cell i at rank 0 must leave out = i.
  const unsigned n = 6;
  auto c = rank_select::build_scan(n);
  for (unsigned i = 0; i < n; ++i) {
    BasisState s(c.total_qubits());
    s.set(c.qubits("mask")[i], true);
    auto out = apply(c, s);
    EXPECT_EQ(out.read(c.qubits("out")), i);
  }
}

TEST(Bijectivity, ExhaustiveOnSmallCircuits) {
  auto c = Circuit::build({{"q", 4, Role::ancilla, 0}},
                          {Gate{{{0, true}, {1, true}}, {2}}, Gate{{{2, false}}, {3, 0}}});
  auto r = check_bijective(c);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.exhaustive);
  EXPECT_EQ(r.checked, 16u);
}

TEST(Bijectivity, SampledAboveTheLimit) {
  auto c = rank_select::build_scan(16);
  BijectivityOptions opt;
  opt.exhaustive_limit = 8;
  opt.samples = 2000;
  auto r = check_bijective(c, opt);
  EXPECT_TRUE(r.ok);
  EXPECT_FALSE(r.exhaustive);
}

TEST(AncillaClean, DetectsDirtyAncilla) {
  Builder b;
  auto in = b.add_register("in", 2, Role::mask);
  auto a = b.add_register("a", 1, Role::ancilla);
  b.mcx({Control{in[0], true}, Control{in[1], true}}, a[0]);
  auto c = std::move(b).finish();
  InputDistribution d;
  d.uniform("in", 4);
  auto r = check_ancilla_clean(c, d);
  EXPECT_FALSE(r.ok);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_TRUE(r.witness->get(in[0]) && r.witness->get(in[1]));

  Builder b2;
  auto in2 = b2.add_register("in", 2, Role::mask);
  auto a2 = b2.add_register("a", 1, Role::ancilla);
  b2.ccx(in2[0], in2[1], a2[0]);
  b2.ccx(in2[0], in2[1], a2[0]);
  auto r2 = check_ancilla_clean(std::move(b2).finish(), d);
  EXPECT_TRUE(r2.ok);
  EXPECT_EQ(r2.checked, 4u);
}

TEST(AncillaClean, RejectsNonzeroAncillaInput) {
  auto c = Circuit::build({{"a", 1, Role::ancilla, 0}}, std::vector<Gate>{});
  InputDistribution d;
  d.fix("a", 1, 1);
  EXPECT_THROW(check_ancilla_clean(c, d), std::invalid_argument);
}

namespace {
// payoff = AND of the two low bits of a 3-bit die with 6 faces: faces {3} hit -> 1/6 ... plus 7 excluded.
Circuit die_circuit() {
  Builder b;
  auto d = b.add_register("die", 3, Role::dice);
  auto p = b.add_register("payoff", 1, Role::payoff);
  b.mcx({Control{d[0], true}, Control{d[1], true}}, p[0]);
  return std::move(b).finish();
}
}  // namespace

TEST(Payoff, ConstantCircuits) {
  auto one = Circuit::build({{"payoff", 1, Role::payoff, 0}}, {Gate{{}, {0}}});
  auto zero = Circuit::build({{"payoff", 1, Role::payoff, 0}}, std::vector<Gate>{});
  InputDistribution d;
  EXPECT_DOUBLE_EQ(payoff_probability(one, d, ExactMode{}).p, 1.0);
  EXPECT_DOUBLE_EQ(payoff_probability(zero, d, ExactMode{}).p, 0.0);
  EXPECT_DOUBLE_EQ(payoff_probability(one, d, MonteCarloMode{100, 1}).p, 1.0);
}

TEST(Payoff, UniformFacesExcludeUnusedCodes) {
  InputDistribution d;
  d.uniform("die", 6);
  auto e = payoff_probability(die_circuit(), d, ExactMode{});
  EXPECT_TRUE(e.exact);
  EXPECT_EQ(e.total, 6u);
  EXPECT_NEAR(e.p, 1.0 / 6.0, 1e-15);  // only face 3 has both low bits set
  Rng rng(9);
  auto c = die_circuit();
  for (int i = 0; i < 2000; ++i) {
    BasisState s(c.total_qubits());
    sample_input(c, d, s, rng);
    EXPECT_LT(s.read(c.qubits("die")), 6u);
  }
}

TEST(Payoff, ChunkedDiceAreIndependent) {
  Builder b;
  auto d = b.add_register("die", 4, Role::dice);
  auto p = b.add_register("payoff", 1, Role::payoff);
  // payoff iff chunk0 == 0 and chunk1 == 2 with faces 3 per 2-bit chunk
  b.mcx({Control{d[0], false}, Control{d[1], false}, Control{d[2], false}, Control{d[3], true}}, p[0]);
  auto c = std::move(b).finish();
  InputDistribution dist;
  dist.uniform("die", 3, 2);
  EXPECT_NEAR(payoff_probability(c, dist, ExactMode{}).p, 1.0 / 9.0, 1e-15);
}

TEST(Payoff, ExactBudgetIsHonoured) {
  InputDistribution d;
  d.uniform("die", 6);
  EXPECT_THROW(payoff_probability(die_circuit(), d, ExactMode{3}), std::runtime_error);
}

TEST(Payoff, MonteCarloCoversTheExactValue) {
  InputDistribution d;
  d.uniform("die", 6);
  auto c = die_circuit();
  const double p = payoff_probability(c, d, ExactMode{}).p;
  const std::uint64_t shots = 4000;
  const double sigma = std::sqrt(p * (1 - p) / shots);
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    auto e = payoff_probability(c, d, MonteCarloMode{shots, seed});
    EXPECT_FALSE(e.exact);
    EXPECT_LE(e.ci_lo, e.p);
    EXPECT_GE(e.ci_hi, e.p);
    if (std::abs(e.p - p) <= 3 * sigma) ++inside;
  }
  EXPECT_GE(inside, 38);
  EXPECT_EQ(payoff_probability(c, d, MonteCarloMode{500, 77}).hits,
            payoff_probability(c, d, MonteCarloMode{500, 77}).hits);
}

TEST(Payoff, Wilson) {
  auto [lo, hi] = wilson95(50, 100);
  EXPECT_NEAR(lo, 0.4038, 1e-3);
  EXPECT_NEAR(hi, 0.5962, 1e-3);
}
