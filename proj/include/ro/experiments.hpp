#pragma once

// Drivers shared by the command-line tool and the acceptance binary.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "ro/rank_select.hpp"
#include "ro/rollout_spec.hpp"

namespace ro::experiments {

// ---- rank-select ----

struct RsEquivalence {
  unsigned n = 0;
  std::uint64_t pairs = 0;  // (mask, rank) pairs run through each circuit
  bool scan_ok = true, blocked_ok = true, clean_ok = true;
  std::string detail;  // first disagreement, if any
  bool ok() const { return scan_ok && blocked_ok && clean_ok; }
};
// Every mask of n bits and every rank of w bits through the scan and blocked circuits, compared
// with select_semantics; mask and rank must be unchanged and every ancilla clean.
RsEquivalence rank_select_equivalence(unsigned n);

struct RsScalingRow {
  unsigned n = 0, w = 0;
  std::size_t scan_gates = 0, blocked_gates = 0;
  double scan_ratio = 0;     // gates / (n w)
  double blocked_ratio = 0;  // gates / (n log2 max(w, 2))
};
std::vector<RsScalingRow> rank_select_scaling(const std::vector<unsigned>& ns);
// Smallest measured n from which blocked stays strictly below scan for every larger measured n.
std::optional<unsigned> blocked_crossover(const std::vector<RsScalingRow>& rows);

struct StructureCheck {
  unsigned n = 0;
  rank_select::Variant variant = rank_select::Variant::scan;
  bool cone_covers_mask = true;
  std::size_t cuts = 0;
  std::size_t min_crossing = 0;
  double max_bound = 0;  // largest right-hand side over the checked cuts
  bool crossing_ok = true;
  bool ok() const { return cone_covers_mask && crossing_ok; }
};
// Light cone of the output register, and crossing_count(t) >= ceil(log2 min(t, n - t)) / (2 max_fan_in)
// at every cut with t mask bits on the left (0 < t < n).
StructureCheck lower_bound_structure(rank_select::Variant v, unsigned n);

// ---- oracle instances ----

struct Instance {
  std::string domain;  // "sway" or "epi"
  unsigned m = 3, horizon = 2, threshold = 2, rho = 2;
  std::string label() const;
  std::unique_ptr<RolloutSpec> make() const;
};

struct PublishedRow {
  std::size_t qubits = 0, depth = 0, gates = 0;
  double mc = 0, mc_half_width = 0, exact = 0;
};

// The three correctness instances and their published figures.
std::vector<std::pair<Instance, PublishedRow>> correctness_instances();

struct CorrectnessRow {
  Instance inst;
  std::size_t qubits = 0, qubits_formula = 0, depth = 0, gates = 0, gates_formula = 0, max_live_ancilla = 0;
  double mc = 0, mc_lo = 0, mc_hi = 0;
  std::uint64_t shots = 0;
  double exact = 0;
  std::uint64_t branches = 0;
  bool branchwise_ok = true;
  std::string branch_detail;
  bool mc_covers_exact() const { return mc_lo <= exact && exact <= mc_hi; }
};
// Builds the oracle, measures it, estimates the payoff from the circuit (Monte Carlo over its input
// distribution), computes the DP-exact value and runs the branchwise check.
CorrectnessRow correctness_row(const Instance& inst, std::uint64_t shots, std::uint64_t seed, std::uint64_t branches);

struct ScalingPoint {
  unsigned m = 0, horizon = 0;
};
std::vector<ScalingPoint> scaling_grid();

struct ScalingRow {
  std::string domain;
  unsigned m = 0, horizon = 0, n = 0;
  std::size_t qubits_formula = 0, gates_formula = 0;
  std::optional<std::size_t> qubits_measured, gates_measured;
  // Qubit breakdown of the formula.
  std::size_t q_config = 0, q_selectors = 0, q_dice = 0, q_ancilla = 0;
  std::size_t published_qubits = 0, published_gates = 0;
  double qubit_rel_diff() const;  // (formula - published) / published
};
// build = false skips composing the full oracle (formula columns only).
ScalingRow scaling_row(const std::string& domain, const ScalingPoint& pt, bool build);

// Exact SIR value as a function of the recovery parameter.
std::vector<std::pair<unsigned, double>> rho_sweep(unsigned m, unsigned horizon, unsigned threshold);

}  // namespace ro::experiments
