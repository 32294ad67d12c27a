#include "ro/oracle.hpp"

#include <algorithm>
#include <stdexcept>

#include "ro/arith.hpp"
#include "ro/rank_select.hpp"

namespace ro::oracle {

std::string cfg_name(unsigned h) { return "cfg" + std::to_string(h); }
std::string sel_name(unsigned h, unsigned k) { return "sel" + std::to_string(h) + "_" + std::to_string(k); }
std::string dice_name(unsigned h) { return "dice" + std::to_string(h); }

namespace {

using Span = std::span<const Qubit>;

unsigned arm_width(const RolloutSpec& spec, const ComposeOptions& opt) {
  if (opt.arms == 0) return 0;
  const unsigned aw = arith::bits_for(opt.arms);
  if (aw > spec.width()) throw std::invalid_argument("arm register wider than the selector width");
  return aw;
}

std::size_t index_scratch(const RolloutSpec& spec) {
  return spec.cells() + rank_select::scan_scratch_qubits(spec.width());
}

std::size_t round_scratch(const RolloutSpec& spec) {
  return std::max({index_scratch(spec), std::size_t{spec.transition_scratch()}, std::size_t{spec.eval_scratch()}});
}

std::size_t scratch_region(const RolloutSpec& spec) {
  return spec.horizon() == 0 ? spec.eval_scratch() : round_scratch(spec);
}

// Emits the oracle phases and checks that domain hooks stay inside the registers they receive.
class Phases {
 public:
  Phases(Builder& b, const RolloutSpec& spec, std::size_t total_qubits) : b_(b), spec_(spec), owner_(total_qubits, 0) {}

  struct Forward {
    std::size_t mask_from, mask_to, rs_from, rs_to;
  };

  // mask, rank-select into out_k, unmask. The out register stays live.
  Forward index_forward(unsigned k, Span prev, const std::vector<Span>& outs, Span nth, Span scratch) {
    const unsigned N = spec_.cells(), w = spec_.width();
    auto mask = scratch.first(N);
    auto rank = scratch.subspan(N, w);
    auto eq = scratch.subspan(N + w, w);
    const Qubit match = scratch[N + 2 * w];
    std::vector<Span> earlier(outs.begin(), outs.begin() + k);
    Forward f{};
    b_.live(static_cast<std::int64_t>(w));
    b_.live(static_cast<std::int64_t>(N));
    f.mask_from = b_.mark();
    spec_.emit_mask(b_, k, prev, earlier, mask);
    f.mask_to = b_.mark();
    std::vector<Span> allowed{prev, mask};
    allowed.insert(allowed.end(), earlier.begin(), earlier.end());
    check("validity mask", f.mask_from, f.mask_to, allowed);
    f.rs_from = b_.mark();
    rank_select::emit_scan(b_, mask, nth, outs[k], rank_select::ScanScratch{rank, eq, match});
    f.rs_to = b_.mark();
    b_.undo_range(f.mask_from, f.mask_to);
    b_.live(-static_cast<std::int64_t>(N));
    return f;
  }

  // Clears out_k: the same mask, the rank-select gates reversed, unmask.
  void index_reverse(const Forward& f) {
    const unsigned N = spec_.cells(), w = spec_.width();
    b_.live(static_cast<std::int64_t>(N));
    const auto m0 = b_.mark();
    b_.undo_range(f.mask_from, f.mask_to);
    const auto m1 = b_.mark();
    b_.undo_range(f.rs_from, f.rs_to);
    b_.undo_range(m0, m1);
    b_.live(-static_cast<std::int64_t>(N));
    b_.live(-static_cast<std::int64_t>(w));
  }

  // Binary-controlled fan-out of out_k into the round-h copy; the value N matches no cell.
  void decode(unsigned k, Span out, Span next) {
    const unsigned bit = spec_.action_bit(k);
    for (unsigned j = 0; j < spec_.cells(); ++j) b_.mcx(equals_const(out, j), next[2 * j + bit]);
  }

  void copy_forward(Span prev, Span next) {
    for (std::size_t q = 0; q < prev.size(); ++q) b_.cx(prev[q], next[q]);
  }

  void transition(const RoundRegs& r, Span scratch) {
    auto s = scratch.first(spec_.transition_scratch());
    b_.live(static_cast<std::int64_t>(s.size()));
    const auto m0 = b_.mark();
    spec_.emit_transition(b_, r, s);
    std::vector<Span> allowed{r.prev, r.next, r.dice, s};
    allowed.insert(allowed.end(), r.outs.begin(), r.outs.end());
    check("transition", m0, b_.mark(), allowed);
    b_.live(-static_cast<std::int64_t>(s.size()));
  }

  void eval(Span cfg, Qubit payoff, Span scratch) {
    auto s = scratch.first(spec_.eval_scratch());
    b_.live(static_cast<std::int64_t>(s.size()));
    const auto m0 = b_.mark();
    spec_.emit_eval(b_, cfg, payoff, s);
    check("eval", m0, b_.mark(), {cfg, Span(&payoff, 1), s});
    b_.live(-static_cast<std::int64_t>(s.size()));
  }

  unsigned round = 0;

 private:
  void check(const char* hook, std::size_t from, std::size_t to, const std::vector<Span>& allowed) {
    ++stamp_;
    for (auto sp : allowed)
      for (auto q : sp) owner_[q] = stamp_;
    auto bad = [&](Qubit q) {
      return q >= owner_.size() || owner_[q] != stamp_;
    };
    for (std::size_t i = from; i < to; ++i) {
      auto g = b_.gate(i);
      for (auto cw : g.controls)
        if (bad(unpack(cw).q)) fail(hook, unpack(cw).q);
      for (auto t : g.targets)
        if (bad(t)) fail(hook, t);
    }
  }
  [[noreturn]] void fail(const char* hook, Qubit q) {
    throw CircuitError(std::string(hook) + " hook in round " + std::to_string(round) + " touched qubit " +
                       std::to_string(q) + " outside its registers");
  }

  Builder& b_;
  const RolloutSpec& spec_;
  std::vector<std::uint32_t> owner_;
  std::uint32_t stamp_ = 0;
};

std::vector<Span> split_outs(Span anc, unsigned S, unsigned w) {
  std::vector<Span> outs;
  for (unsigned k = 0; k < S; ++k) outs.push_back(anc.subspan(static_cast<std::size_t>(k) * w, w));
  return outs;
}

}  // namespace

QubitBreakdown qubit_cost_formula(const RolloutSpec& spec, const ComposeOptions& opt) {
  const std::size_t N = spec.cells(), H = spec.horizon(), S = spec.selectors_per_round(), w = spec.width();
  QubitBreakdown q;
  q.config = (H + 1) * N * spec.cell_bits();
  q.selectors = S * H * w;
  q.dice = H * N * spec.dice_bits();
  q.arm = arm_width(spec, opt);
  q.anc_eval = spec.eval_scratch();
  if (H > 0) {
    q.anc_outs = S * w;
    q.anc_index = index_scratch(spec);
    q.anc_transition = spec.transition_scratch();
  }
  q.ancilla = q.anc_outs + scratch_region(spec);
  q.total = q.config + q.selectors + q.dice + q.arm + q.ancilla + q.payoff;
  return q;
}

FragmentCosts measure_fragments(const RolloutSpec& spec, const ComposeOptions& opt) {
  const unsigned N = spec.cells(), S = spec.selectors_per_round(), w = spec.width();
  const unsigned aw = arm_width(spec, opt);
  Builder b;
  auto prev = b.add_register("prev", 2 * N, Role::config);
  auto next = b.add_register("next", 2 * N, Role::config);
  auto nth = b.add_register("nth", w, Role::selector);
  auto dice = b.add_register("dice", N * spec.dice_bits(), Role::dice);
  std::vector<Qubit> arm;
  if (aw) arm = b.add_register("arm", aw, Role::arm);
  auto outs_reg = b.add_register("outs", S * w, Role::ancilla);
  // Fragments are per-round costs, so they are measured with the round scratch even when H = 0.
  auto scratch = b.add_register("scratch", static_cast<std::uint32_t>(round_scratch(spec)), Role::ancilla);
  auto payoff = b.add_register("payoff", 1, Role::payoff);
  const auto outs = split_outs(outs_reg, S, w);
  Phases ph(b, spec, b.total_qubits());

  FragmentCosts f;
  auto index_cost = [&](unsigned k, Span n) {
    const auto m0 = b.mark();
    auto fw = ph.index_forward(k, prev, outs, n, scratch);
    ph.decode(k, outs[k], next);
    ph.index_reverse(fw);
    return b.mark() - m0;
  };
  for (unsigned k = 0; k < S; ++k) f.index.push_back(index_cost(k, nth));
  if (aw) f.index_arm = index_cost(0, arm);

  auto m0 = b.mark();
  ph.copy_forward(prev, next);
  ph.transition(RoundRegs{prev, next, outs, dice}, scratch);
  f.transition = b.mark() - m0;

  m0 = b.mark();
  ph.eval(prev, payoff[0], scratch);
  f.eval = b.mark() - m0;
  return f;
}

std::size_t gate_cost_formula(const RolloutSpec& spec, const FragmentCosts& f, const ComposeOptions& opt) {
  const std::size_t H = spec.horizon();
  std::size_t per_round = 0;
  for (auto g : f.index) per_round += g;
  std::size_t total = H * per_round + H * f.transition + f.eval;
  if (opt.arms && H > 0) total = total - f.index.at(0) + f.index_arm;
  return total;
}

Circuit compose(const RolloutSpec& spec, const ComposeOptions& opt) {
  const unsigned N = spec.cells(), H = spec.horizon(), S = spec.selectors_per_round(), w = spec.width();
  const unsigned aw = arm_width(spec, opt);
  const auto qb = qubit_cost_formula(spec, opt);
  Builder b;
  std::vector<std::vector<Qubit>> cfg, dice;
  std::vector<std::vector<std::vector<Qubit>>> sel(H + 1);
  for (unsigned h = 0; h <= H; ++h) cfg.push_back(b.add_register(cfg_name(h), 2 * N, Role::config));
  for (unsigned h = 1; h <= H; ++h)
    for (unsigned k = 0; k < S; ++k) sel[h].push_back(b.add_register(sel_name(h, k), w, Role::selector));
  dice.emplace_back();
  for (unsigned h = 1; h <= H; ++h) dice.push_back(b.add_register(dice_name(h), N * spec.dice_bits(), Role::dice));
  std::vector<Qubit> arm;
  if (aw) arm = b.add_register(kArm, aw, Role::arm);
  auto anc = b.add_register(kAnc, static_cast<std::uint32_t>(qb.ancilla), Role::ancilla);
  auto payoff = b.add_register(kPayoff, 1, Role::payoff);

  Span pool(anc);
  const auto outs = split_outs(pool, H > 0 ? S : 0, w);
  Span scratch = pool.subspan(qb.anc_outs);
  Phases ph(b, spec, b.total_qubits());

  for (unsigned h = 1; h <= H; ++h) {
    ph.round = h;
    Span prev(cfg[h - 1]), next(cfg[h]);
    ph.copy_forward(prev, next);
    std::vector<Phases::Forward> fw;
    for (unsigned k = 0; k < S; ++k) {
      Span nth = (h == 1 && k == 0 && aw) ? Span(arm) : Span(sel[h][k]);
      fw.push_back(ph.index_forward(k, prev, outs, nth, scratch));
    }
    for (unsigned k = 0; k < S; ++k) ph.decode(k, outs[k], next);
    ph.transition(RoundRegs{prev, next, outs, dice[h]}, scratch);
    for (unsigned k = S; k-- > 0;) ph.index_reverse(fw[k]);
  }
  ph.round = H;
  ph.eval(cfg[H], payoff[0], scratch);
  return std::move(b).finish();
}

InputDistribution input_distribution(const RolloutSpec& spec, const Circuit& c, const Config& init,
                                     std::optional<std::uint64_t> arm) {
  InputDistribution d;
  std::vector<bool> bits(2 * spec.cells());
  for (unsigned j = 0; j < spec.cells(); ++j) {
    bits[2 * j] = init.at(j) & 1u;
    bits[2 * j + 1] = (init[j] >> 1) & 1u;
  }
  d.fix_bits(cfg_name(0), bits);
  for (unsigned h = 1; h <= spec.horizon(); ++h) {
    for (unsigned k = 0; k < spec.selectors_per_round(); ++k)
      d.uniform(sel_name(h, k), std::uint64_t{1} << spec.width());
    d.uniform(dice_name(h), spec.dice_faces(), spec.dice_bits());
  }
  if (c.has_register(kArm)) d.fix(kArm, arm.value_or(0), c.reg(kArm).width);
  return d;
}

void load_branch(const RolloutSpec& spec, const Circuit& c, const Config& init, const domains::Branch& br,
                 std::optional<std::uint64_t> arm, BasisState& s) {
  const unsigned N = spec.cells(), H = spec.horizon(), S = spec.selectors_per_round(), d = spec.dice_bits();
  s = BasisState(c.total_qubits());
  const auto c0 = c.reg(cfg_name(0)).offset;
  for (unsigned j = 0; j < N; ++j) {
    s.set(c0 + 2 * j, init[j] & 1u);
    s.set(c0 + 2 * j + 1, (init[j] >> 1) & 1u);
  }
  for (unsigned h = 1; h <= H; ++h) {
    for (unsigned k = 0; k < S; ++k) {
      const auto& r = c.reg(sel_name(h, k));
      for (unsigned i = 0; i < r.width; ++i) s.set(r.offset + i, (br.selectors[(h - 1) * S + k] >> i) & 1u);
    }
    const auto off = c.reg(dice_name(h)).offset;
    for (unsigned j = 0; j < N; ++j)
      for (unsigned i = 0; i < d; ++i) s.set(off + j * d + i, (br.dice[(h - 1) * N + j] >> i) & 1u);
  }
  if (arm && c.has_register(kArm)) {
    const auto& r = c.reg(kArm);
    for (unsigned i = 0; i < r.width; ++i) s.set(r.offset + i, (*arm >> i) & 1u);
  }
}

Config read_config(const RolloutSpec& spec, const Circuit& c, const BasisState& s, unsigned h) {
  const auto off = c.reg(cfg_name(h)).offset;
  Config out(spec.cells());
  for (unsigned j = 0; j < spec.cells(); ++j)
    out[j] = static_cast<std::uint8_t>(s.get(off + 2 * j) | (s.get(off + 2 * j + 1) << 1));
  return out;
}

BranchReport branchwise_check(const RolloutSpec& spec, const Circuit& c, const Config& init, std::uint64_t seeds,
                              std::uint64_t root_seed, std::optional<std::uint64_t> arm) {
  const unsigned H = spec.horizon();
  Program prog(c);
  BranchReport rep;
  const auto anc = c.qubits_with_role(Role::ancilla);
  auto mismatch = [&](std::uint64_t i, unsigned round, std::string reg, std::string detail) {
    rep.ok = false;
    rep.first = Mismatch{i, round, std::move(reg), std::move(detail)};
  };
  BasisState in, s;
  for (std::uint64_t i = 0; i < seeds && rep.ok; ++i) {
    Rng rng(derive_seed(root_seed, i));
    const auto br = domains::sample_branch(spec, rng);
    const auto traj = domains::classical_rollout(spec, init, br.selectors, br.dice, arm);
    load_branch(spec, c, init, br, arm, in);
    s = in;
    prog.run(s);
    ++rep.checked;
    for (unsigned h = 1; h <= H && rep.ok; ++h) {
      const auto got = read_config(spec, c, s, h);
      for (unsigned j = 0; j < spec.cells(); ++j)
        if (got[j] != traj.boards[h][j]) {
          mismatch(i, h, cfg_name(h),
                   "cell " + std::to_string(j) + ": circuit " + std::to_string(got[j]) + ", classical " +
                       std::to_string(traj.boards[h][j]));
          break;
        }
    }
    if (!rep.ok) break;
    const bool pay = s.get(c.reg(kPayoff).offset);
    if (pay != traj.payoff) {
      mismatch(i, H, kPayoff, std::string("circuit ") + (pay ? "1" : "0") + ", classical " + (traj.payoff ? "1" : "0"));
      break;
    }
    for (const auto& r : c.registers()) {
      if (r.role != Role::selector && r.role != Role::dice && r.role != Role::arm && r.name != cfg_name(0)) continue;
      for (unsigned q = r.offset; q < r.offset + r.width; ++q)
        if (s.get(q) != in.get(q)) {
          mismatch(i, 0, r.name, "read-only register changed");
          break;
        }
      if (!rep.ok) break;
    }
    for (auto q : anc)
      if (rep.ok && s.get(q)) mismatch(i, 0, kAnc, "ancilla qubit " + std::to_string(q) + " left dirty");
  }
  return rep;
}

}  // namespace ro::oracle
