#include <gtest/gtest.h>

#include "ro/oracle.hpp"

using namespace ro;
using namespace ro::domains;
namespace orc = ro::oracle;

namespace {

// Wraps a domain and perturbs one of its hooks.
class Corrupted : public RolloutSpec {
 public:
  enum class Mode { extra_flip, foreign_register };
  Corrupted(const RolloutSpec& inner, Mode mode) : in_(inner), mode_(mode) {}
  std::string name() const override { return in_.name(); }
  unsigned side() const override { return in_.side(); }
  unsigned horizon() const override { return in_.horizon(); }
  unsigned dice_bits() const override { return in_.dice_bits(); }
  unsigned dice_faces() const override { return in_.dice_faces(); }
  unsigned selectors_per_round() const override { return in_.selectors_per_round(); }
  Config initial_config() const override { return in_.initial_config(); }
  unsigned action_bit(unsigned s) const override { return in_.action_bit(s); }
  std::uint8_t cell_next(const Config& c, unsigned j, unsigned d) const override { return in_.cell_next(c, j, d); }
  int cell_stat(std::uint8_t s) const override { return in_.cell_stat(s); }
  bool payoff_from_stat(int t) const override { return in_.payoff_from_stat(t); }
  void emit_mask(Builder& b, unsigned sel, std::span<const Qubit> prev, const std::vector<std::span<const Qubit>>& e,
                 std::span<const Qubit> mask) const override {
    in_.emit_mask(b, sel, prev, e, mask);
  }
  unsigned transition_scratch() const override { return in_.transition_scratch(); }
  void emit_transition(Builder& b, const RoundRegs& r, std::span<const Qubit> scratch) const override {
    in_.emit_transition(b, r, scratch);
    if (mode_ == Mode::extra_flip) {
      // Cell 2 becomes recovered whenever its die reads 7.
      auto die = r.dice.subspan(2 * dice_bits(), dice_bits());
      b.mcx(equals_const(die, 7), r.next[5]);
    } else {
      b.cx(r.prev[0] - 1, r.next[0]);
    }
  }
  unsigned eval_scratch() const override { return in_.eval_scratch(); }
  void emit_eval(Builder& b, std::span<const Qubit> cfg, Qubit payoff, std::span<const Qubit> s) const override {
    in_.emit_eval(b, cfg, payoff, s);
  }

 private:
  const RolloutSpec& in_;
  Mode mode_;
};

}  // namespace

TEST(QubitFormula, WorkedBreakdowns) {
  Sir e(3, 2, 2);
  auto q = orc::qubit_cost_formula(e);
  EXPECT_EQ(q.config + q.selectors + q.dice, 116u);
  EXPECT_EQ(q.anc_outs, 4u);
  EXPECT_EQ(q.anc_index, 9u + 2 * 4 + 1);
  EXPECT_EQ(q.total, 116u + q.ancilla + 1);
  Sway s(3, 2);
  auto qs = orc::qubit_cost_formula(s);
  EXPECT_EQ(qs.config + qs.selectors + qs.dice, 160u);
  EXPECT_EQ(qs.total, 160u + qs.ancilla + 1);
  Sir e0(3, 0, 2);
  auto q0 = orc::qubit_cost_formula(e0);
  EXPECT_EQ(q0.total, 9u * 2 + q0.ancilla + 1);
  EXPECT_EQ(q0.ancilla, e0.eval_scratch());
}

TEST(GateFormula, SingleRoundSingleSelector) {
  Sir e(3, 1, 2);
  auto f = orc::measure_fragments(e);
  ASSERT_EQ(f.index.size(), 1u);
  EXPECT_EQ(orc::gate_cost_formula(e, f), f.index[0] + f.transition + f.eval);
}

TEST(GateFormula, MeasuredEqualsPredicted) {
  std::vector<std::unique_ptr<RolloutSpec>> specs;
  specs.push_back(std::make_unique<Sir>(3, 2, 2));
  specs.push_back(std::make_unique<Sway>(3, 2));
  specs.push_back(std::make_unique<Sway>(4, 3));
  specs.push_back(std::make_unique<Sir>(5, 4, 3, 1));
  specs.push_back(std::make_unique<Sir>(2, 0, 1));
  for (const auto& sp : specs)
    for (unsigned arms : {0u, 3u}) {
      orc::ComposeOptions opt{arms};
      auto c = orc::compose(*sp, opt);
      EXPECT_EQ(c.gate_count(), orc::gate_cost_formula(*sp, orc::measure_fragments(*sp, opt), opt))
          << sp->name() << " m=" << sp->side() << " H=" << sp->horizon() << " arms=" << arms;
      EXPECT_EQ(c.total_qubits(), orc::qubit_cost_formula(*sp, opt).total);
    }
}

TEST(Compose, HorizonZeroIsEvalOnly) {
  Sir e(3, 0, 1);
  auto c = orc::compose(e);
  EXPECT_EQ(c.gate_count(), orc::measure_fragments(e).eval);
  InputDistribution d = orc::input_distribution(e, c, e.initial_config());
  EXPECT_EQ(payoff_probability(c, d, ExactMode{}).p, 1.0);
  Sir e0(3, 0, 0);
  auto c0 = orc::compose(e0);
  EXPECT_EQ(payoff_probability(c0, orc::input_distribution(e0, c0, e0.initial_config()), ExactMode{}).p, 0.0);
}

TEST(Branchwise, SirAndSwayThreeByThree) {
  Sir e(3, 2, 2);
  auto r = orc::branchwise_check(e, orc::compose(e), e.initial_config(), 1000, 1);
  EXPECT_TRUE(r.ok) << (r.first ? r.first->reg + ": " + r.first->detail : "");
  EXPECT_EQ(r.checked, 1000u);
  Sway s(3, 2);
  auto rs = orc::branchwise_check(s, orc::compose(s), s.initial_config(), 1000, 2);
  EXPECT_TRUE(rs.ok) << (rs.first ? rs.first->reg + ": " + rs.first->detail : "");
}

TEST(Branchwise, NonTrivialStartsAndArms) {
  Sway s(3, 3);
  auto init = parse_grid(s, "B . W\n. B .\nW . .");
  orc::ComposeOptions opt{5};
  auto c = orc::compose(s, opt);
  for (std::uint64_t arm = 0; arm < 5; ++arm) {
    auto r = orc::branchwise_check(s, c, init, 200, 10 + arm, arm);
    EXPECT_TRUE(r.ok) << "arm " << arm << (r.first ? " " + r.first->reg + ": " + r.first->detail : "");
  }
  Sir e(4, 3, 4, 5);
  auto ie = parse_grid(e, "S I S S\nS R S S\nS S S I\nI S S S");
  auto re = orc::branchwise_check(e, orc::compose(e), ie, 300, 77);
  EXPECT_TRUE(re.ok) << (re.first ? re.first->reg + ": " + re.first->detail : "");
}

TEST(Branchwise, CorruptedTransitionIsLocalised) {
  Sir e(3, 2, 2);
  Corrupted bad(e, Corrupted::Mode::extra_flip);
  auto r = orc::branchwise_check(bad, orc::compose(bad), e.initial_config(), 1000, 1);
  ASSERT_FALSE(r.ok);
  ASSERT_TRUE(r.first.has_value());
  EXPECT_TRUE(r.first->reg == "cfg1" || r.first->reg == "cfg2") << r.first->reg;
  EXPECT_NE(r.first->detail.find("cell 2"), std::string::npos) << r.first->detail;
}

TEST(Compose, HookTouchingForeignRegisterIsRejected) {
  Sir e(3, 2, 2);
  Corrupted bad(e, Corrupted::Mode::foreign_register);
  try {
    orc::compose(bad);
    FAIL() << "expected CircuitError";
  } catch (const CircuitError& err) {
    EXPECT_NE(std::string(err.what()).find("transition"), std::string::npos);
  }
}

TEST(Compose, InverseRestoresEveryRegister) {
  Sway s(2, 2);
  auto c = orc::compose(s);
  auto inv = invert(c);
  Rng rng(4);
  for (int t = 0; t < 300; ++t) {
    BasisState b(c.total_qubits());
    for (Qubit q = 0; q < c.total_qubits(); ++q) b.set(q, rng.below(2));
    EXPECT_EQ(apply(inv, apply(c, b)), b);
  }
}

TEST(Compose, SmallestInstancesAreBijective) {
  Sir e(1, 1, 0);
  auto ce = orc::compose(e);
  EXPECT_LE(ce.total_qubits(), 20u);
  auto r = check_bijective(ce);
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.exhaustive);
  Sway s(1, 1);
  auto cs = orc::compose(s);
  EXPECT_LE(cs.total_qubits(), 20u);
  auto rs = check_bijective(cs);
  EXPECT_TRUE(rs.ok);
  EXPECT_TRUE(rs.exhaustive);
}

TEST(Compose, LiveAncillaDoesNotGrowWithHorizon) {
  for (int kind = 0; kind < 2; ++kind) {
    std::size_t first = 0;
    for (unsigned H = 1; H <= 6; ++H) {
      auto sp = make(kind ? "sway" : "epi", 3, H, 2);
      const auto live = cost(orc::compose(*sp)).max_live_ancilla;
      if (H == 1) first = live;
      EXPECT_EQ(live, first) << sp->name() << " H=" << H;
      EXPECT_LE(live, orc::qubit_cost_formula(*sp).ancilla);
    }
  }
}

TEST(Compose, AncillaCleanOverSampledBranches) {
  Sway s(3, 2);
  auto c = orc::compose(s);
  auto r = check_ancilla_clean(c, orc::input_distribution(s, c, s.initial_config()), 1, 3000, 8);
  EXPECT_TRUE(r.ok);
}

TEST(Compose, CircuitPayoffMatchesExactDp) {
  // Exhaustive enumeration over selectors and dice on the circuit versus the distribution DP.
  Sir e(2, 1, 1, 3);
  auto c = orc::compose(e);
  auto pe = payoff_probability(c, orc::input_distribution(e, c, e.initial_config()), ExactMode{});
  EXPECT_TRUE(pe.exact);
  EXPECT_NEAR(pe.p, exact_value(e, e.initial_config()), 1e-12);

  orc::ComposeOptions opt{3};
  auto ca = orc::compose(e, opt);
  for (std::uint64_t arm = 0; arm < 3; ++arm) {
    auto pa = payoff_probability(ca, orc::input_distribution(e, ca, e.initial_config(), arm), ExactMode{});
    EXPECT_NEAR(pa.p, exact_value(e, e.initial_config(), arm), 1e-12) << arm;
  }
}

TEST(Compose, MonteCarloCoversExactValue) {
  Sway s(3, 2);
  auto c = orc::compose(s);
  auto mc = payoff_probability(c, orc::input_distribution(s, c, s.initial_config()), MonteCarloMode{10000, 5});
  const double ex = exact_value(s, s.initial_config());
  EXPECT_LE(mc.ci_lo, ex);
  EXPECT_GE(mc.ci_hi, ex);
}

TEST(Compose, SentinelSelectorLeavesBoardToTheDynamics) {
  Sir e(3, 1, 2, 0);
  auto c = orc::compose(e);
  Branch br{{15}, std::vector<std::uint16_t>(9, 7)};
  BasisState s;
  orc::load_branch(e, c, e.initial_config(), br, {}, s);
  s = apply(c, s);
  // Die 7 never infects and rho = 0 never recovers, so with no action the board is unchanged.
  EXPECT_EQ(orc::read_config(e, c, s, 1), e.initial_config());
}
