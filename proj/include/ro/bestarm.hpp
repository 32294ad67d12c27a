#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ro::bestarm {

// Bernoulli KL divergence in nats. Returns +infinity when q puts zero mass where p does not.
double kl(double p, double q);

// (k - 1) ln 2 / (288 eps^2). Requires k >= 2 and 0 < eps <= 1/8 (the range where the base
// instance is a valid Bernoulli family); throws std::invalid_argument otherwise.
double classical_lower_bound(unsigned k, double eps);

struct BanditInstance {
  std::vector<double> means;
  double eps = 0;
  std::optional<unsigned> alternative;  // arm raised to 1/2 + 6 eps, if any
  bool clipped = false;                 // some nominal mean fell outside [0, 1] and was clamped
  unsigned k() const { return static_cast<unsigned>(means.size()); }
  unsigned best() const;
};

// Base: arm 0 at 1/2 + 4 eps, the rest at 1/2. alternative(j) additionally sets arm j to 1/2 + 6 eps.
// Means outside [0, 1] are clamped and flagged.
BanditInstance hard_instance(unsigned k, double eps, std::optional<unsigned> alternative = {});

struct QueryLedger {
  std::uint64_t oracle_calls = 0;
  std::vector<std::uint64_t> pulls;  // per arm; empty for the quantum accounting
  std::uint64_t comparisons = 0;     // quantum: threshold comparisons (one AE run each)
  unsigned chosen = 0;
  bool correct = false;  // chosen mean within eps of the best
};

// Successive elimination with anytime Hoeffding radii (dyadic peeling), confidence 1 - delta.
// Stops when one arm survives or the radius drops below eps / 2.
QueryLedger classical_baseline(const BanditInstance& inst, double eps, std::uint64_t seed, double delta = 1.0 / 3);

struct QuantumConstants {
  // Oracle calls per amplitude-estimation run are ceil(c_ae / eps).
  double c_ae = 3.14159265358979323846;
  // Maximum-finding comparison budget: c_dh * sqrt(k) + c_log * log2(k)^2.
  double c_dh = 22.5;
  double c_log = 1.4;
};

// Query-level simulation of maximum finding over amplitude-estimated arm means.
QueryLedger quantum_accounting(const BanditInstance& inst, double eps, std::uint64_t seed,
                               const QuantumConstants& qc = {});

struct SeparationRow {
  unsigned k = 0;
  double eps = 0;
  bool valid = true;  // hard instance representable without clamping
  double lower_bound = 0;  // NaN when invalid
  double classical_mean = 0, classical_sd = 0, classical_success = 0;
  double quantum_mean = 0, quantum_sd = 0, quantum_success = 0;
};

struct Slopes {
  // Joint least squares fit log y = a + b log k + c log(1/eps) over the valid rows.
  double classical_k = 0, classical_inv_eps = 0;
  double quantum_k = 0, quantum_inv_eps = 0;
  std::size_t rows_used = 0;
};

struct SeparationReport {
  std::vector<SeparationRow> rows;
  Slopes slopes;
};

SeparationReport separation_report(const std::vector<unsigned>& ks, const std::vector<double>& eps, unsigned trials,
                                   std::uint64_t seed, const QuantumConstants& qc = {});

struct TransportArm {
  unsigned arm = 0;
  double mean_pulls = 0, se = 0;
  bool ok = true;  // mean_pulls + 3 se >= ratio
};
struct TransportReport {
  double ratio = 0;  // kl(1/3, 2/3) / kl(1/2, 1/2 + 6 eps)
  std::vector<TransportArm> arms;  // non-best arms of the base instance
  bool ok = true;
};
TransportReport transport_check(unsigned k, double eps, unsigned trials, std::uint64_t seed);

// Ordinary least squares of y on the columns of x plus an intercept; returns the coefficients
// without the intercept.
std::vector<double> least_squares(const std::vector<std::vector<double>>& x, const std::vector<double>& y);

}  // namespace ro::bestarm
