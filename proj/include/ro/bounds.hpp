#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ro/rollout_spec.hpp"

namespace ro::bounds {

struct InfluenceModel {
  unsigned kappa = 4;  // maximum degree, >= 2
  double p = 0;        // per-edge per-round disagreement probability
  unsigned horizon = 0;
  bool subcritical() const { return kappa * p < 1; }
  void validate() const;  // throws std::invalid_argument
};

// min{1, kappa/(kappa-1) * ((kappa-1) p)^d}; d = 0 gives 1.
double decay_per_round(const InfluenceModel& m, unsigned d);

// 0 for d > H, else min{1, sum_{l=d}^{H} kappa (kappa-1)^(l-1) C(H,l) p^l}. Binomials and powers of
// (kappa-1) are exact integers; d >= 1.
double decay_cumulative(const InfluenceModel& m, unsigned d);

unsigned manhattan(unsigned m, unsigned a, unsigned b);

struct PeripheralSet {
  unsigned radius = 0;           // r* = H + 1
  unsigned anchor = 0;           // centre cell (floor(m/2), floor(m/2))
  std::vector<unsigned> cells;   // distance > r*
  bool inequality = false;       // m^2 > 2 r*^2 + 2 r* + 1
  bool nonempty() const { return !cells.empty(); }
};
PeripheralSet peripheral_set(unsigned m, unsigned horizon);

struct InfluenceResult {
  unsigned distance = 0;
  std::uint64_t trials = 0;
  // Fraction of coupled pairs whose boards differ at the action cell in some round.
  double reach = 0, reach_se = 0;
  // Payoff probability difference between the two starts, same coupling.
  double payoff_delta = 0, payoff_se = 0;
  double bound = 0;  // decay_cumulative at `distance` (1 when distance = 0)
  bool ok = true;    // reach <= bound + 3 se
};

// Couples rollouts from `base` and `base` with `site` set to `alt` through shared selector and dice
// streams (trial i uses derive_seed(seed, i)).
InfluenceResult empirical_influence(const RolloutSpec& spec, const Config& base, unsigned site, std::uint8_t alt,
                                    unsigned action_cell, const InfluenceModel& model, std::uint64_t trials,
                                    std::uint64_t seed);

// Values of every arm at a configuration.
using ValueOracle = std::function<std::vector<double>(const Config&)>;

// Arms named by cell: arm i places on cell arm_cells[i] in round 1 (through its rank among the valid
// cells of C). Exact DP per arm.
ValueOracle positional_arm_oracle(const RolloutSpec& spec, std::vector<unsigned> arm_cells, std::uint64_t budget = 0);

struct LiftingWitness {
  unsigned alphabet = 3;                    // |Sigma|; factor values are 0..alphabet-1
  Config base;                              // C*
  unsigned best = 0;                        // a*
  double eps = 0;
  std::vector<double> delta;                // per factor, size n
  std::vector<unsigned> peripheral;         // Q
  std::vector<std::vector<unsigned>> supports;  // R_i, one per arm
};

struct LiftingReport {
  bool structural_ok = true;
  std::string structural_detail;
  double delta_sum = 0;
  std::vector<double> base_values;
  bool base_gap_ok = true;
  std::string family_size;  // |Sigma|^|Q| as an exact decimal
  std::uint64_t members_checked = 0;
  bool exhaustive = false;
  bool eps_optimal = true;
  bool modular = false;           // every delta_p on Q is zero
  bool modular_equal = true;      // only meaningful when modular
  double max_value_shift = 0;     // max over members and arms of |v_j(C) - v_j(C*)|
  std::optional<Config> witness;  // first member violating a value check
  std::string value_detail;
  bool ok() const { return structural_ok && base_gap_ok && eps_optimal && (!modular || modular_equal); }
};

// Members: exhaustive when |Sigma|^|Q| <= 4096, otherwise the constant corners plus `samples`
// seeded uniform draws over Sigma^Q. Structural failures skip the value checks.
LiftingReport check_lifting(const LiftingWitness& w, const ValueOracle& values, std::uint64_t samples,
                            std::uint64_t seed, double tolerance = 1e-9);

}  // namespace ro::bounds
