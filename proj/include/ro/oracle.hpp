#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ro/circuit.hpp"
#include "ro/domains.hpp"
#include "ro/emulator.hpp"
#include "ro/rollout_spec.hpp"

namespace ro::oracle {

struct ComposeOptions {
  // When non-zero, an arm register of bits_for(arms) qubits replaces the round-1 value of selector 0:
  // arm j places on the j-th valid cell.
  unsigned arms = 0;
};

// Register names used by compose().
std::string cfg_name(unsigned h);                // h = 0..H
std::string sel_name(unsigned h, unsigned k);    // h = 1..H
std::string dice_name(unsigned h);               // h = 1..H
inline const char* kAnc = "anc";
inline const char* kPayoff = "payoff";
inline const char* kArm = "arm";

struct QubitBreakdown {
  std::size_t config = 0, selectors = 0, dice = 0, arm = 0, payoff = 1;
  // q_anc = live outs + max(index scratch, transition scratch, eval scratch) when H > 0,
  // and the eval scratch alone when H = 0.
  std::size_t anc_outs = 0, anc_index = 0, anc_transition = 0, anc_eval = 0, ancilla = 0;
  std::size_t total = 0;
};
QubitBreakdown qubit_cost_formula(const RolloutSpec& spec, const ComposeOptions& opt = {});

// Gate counts of the individual phases, each measured on a standalone fragment circuit.
struct FragmentCosts {
  std::vector<std::size_t> index;  // per selector: mask, rank-select, unmask, decode, and the reverse pass
  std::size_t index_arm = 0;       // selector 0 in round 1 when an arm register is present
  std::size_t transition = 0;      // copy-forward plus the transition hook
  std::size_t eval = 0;
};
FragmentCosts measure_fragments(const RolloutSpec& spec, const ComposeOptions& opt = {});

// G_call = H * sum_k index[k] + H * transition + eval, with index[0] swapped for index_arm once
// when an arm register is present.
std::size_t gate_cost_formula(const RolloutSpec& spec, const FragmentCosts& f, const ComposeOptions& opt = {});

// Builds the full oracle. Throws CircuitError when a domain hook touches qubits outside the
// registers it was handed.
Circuit compose(const RolloutSpec& spec, const ComposeOptions& opt = {});

// Input distribution of the oracle: cfg0 fixed to `init`, selectors uniform over 2^w, dice uniform
// over faces per cell, optional arm fixed, everything else zero.
InputDistribution input_distribution(const RolloutSpec& spec, const Circuit& c, const Config& init,
                                     std::optional<std::uint64_t> arm = {});

// Writes one branch into a basis state (all other qubits zero).
void load_branch(const RolloutSpec& spec, const Circuit& c, const Config& init, const domains::Branch& br,
                 std::optional<std::uint64_t> arm, BasisState& s);
Config read_config(const RolloutSpec& spec, const Circuit& c, const BasisState& s, unsigned h);

struct Mismatch {
  std::uint64_t seed_index = 0;
  unsigned round = 0;      // 0 for registers that are not per round
  std::string reg;
  std::string detail;
};
struct BranchReport {
  bool ok = true;
  std::uint64_t checked = 0;
  std::optional<Mismatch> first;
};

// Emulates `seeds` branches (branch i drawn from derive_seed(root_seed, i)) and compares every
// round's configuration and the payoff bit with the classical rollout. Also checks that selector,
// dice, cfg0 and arm registers are unchanged and the ancilla pool is clean.
BranchReport branchwise_check(const RolloutSpec& spec, const Circuit& c, const Config& init, std::uint64_t seeds,
                              std::uint64_t root_seed, std::optional<std::uint64_t> arm = {});

}  // namespace ro::oracle
