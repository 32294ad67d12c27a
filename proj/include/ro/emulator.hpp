#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ro/circuit.hpp"
#include "ro/rng.hpp"

namespace ro {

class BasisState {
 public:
  BasisState() = default;
  explicit BasisState(std::size_t n) : n_(n), w_((n + 63) / 64, 0) {}

  std::size_t size() const { return n_; }
  bool get(Qubit q) const { return (w_[q >> 6] >> (q & 63)) & 1u; }
  void set(Qubit q, bool v) {
    auto m = std::uint64_t{1} << (q & 63);
    w_[q >> 6] = v ? (w_[q >> 6] | m) : (w_[q >> 6] & ~m);
  }
  void flip(Qubit q) { w_[q >> 6] ^= std::uint64_t{1} << (q & 63); }
  // Little-endian read/write over an arbitrary qubit list (at most 64 entries).
  std::uint64_t read(std::span<const Qubit> qs) const;
  void write(std::span<const Qubit> qs, std::uint64_t value);
  std::vector<std::uint64_t>& words() { return w_; }
  const std::vector<std::uint64_t>& words() const { return w_; }
  std::string to_string() const;  // qubit 0 first
  friend bool operator==(const BasisState&, const BasisState&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<std::uint64_t> w_;
};

// Gate list lowered to word masks for fast evaluation.
class Program {
 public:
  explicit Program(const Circuit& c);
  void run(BasisState& s) const;
  void run_inverse(BasisState& s) const;
  // Single-word fast path; only valid when the circuit has at most 64 qubits.
  std::uint64_t run64(std::uint64_t s) const;
  std::size_t qubits() const { return n_; }

 private:
  struct Term {
    std::uint32_t word;
    std::uint64_t mask, value;
  };
  struct Op {
    std::uint32_t cbeg, cend, tbeg, tend;
  };
  void step(const Op& op, BasisState& s) const;
  std::size_t n_ = 0;
  std::vector<Op> ops_;
  std::vector<Term> cterms_, tterms_;
  std::vector<std::uint64_t> cm64_, cv64_, tm64_;
};

BasisState apply(const Circuit& c, BasisState b);

struct BijectivityResult {
  bool ok = true;
  bool exhaustive = false;
  std::uint64_t checked = 0;
  // On failure: two distinct inputs with the same image (or an input whose round trip failed).
  std::optional<std::pair<BasisState, BasisState>> witness;
};

struct BijectivityOptions {
  std::size_t exhaustive_limit = 26;  // qubits
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

BijectivityResult check_bijective(const Circuit& c, const BijectivityOptions& opt = {});

// Per-register input specification. Registers that are not listed are fixed to zero.
struct Fixed {
  std::vector<bool> bits;  // little-endian
  static Fixed of(std::uint64_t v, std::size_t width);
};
// Register split into chunks of `chunk_bits`, each uniform over {0..faces-1}.
struct UniformChunks {
  std::uint32_t chunk_bits = 0;  // 0 means the whole register is one chunk
  std::uint64_t faces = 0;
};
using RegisterDist = std::variant<Fixed, UniformChunks>;

class InputDistribution {
 public:
  InputDistribution& fix(const std::string& reg, std::uint64_t value, std::size_t width);
  InputDistribution& fix_bits(const std::string& reg, std::vector<bool> bits);
  InputDistribution& uniform(const std::string& reg, std::uint64_t faces, std::uint32_t chunk_bits = 0);
  const std::map<std::string, RegisterDist>& entries() const { return entries_; }
  void validate(const Circuit& c) const;

 private:
  std::map<std::string, RegisterDist> entries_;
};

struct CleanResult {
  bool ok = true;
  std::uint64_t checked = 0;
  std::optional<BasisState> witness;  // first input leaving an ancilla dirty
};

// Enumerates the distribution if its support fits `budget`, otherwise samples `samples` inputs.
CleanResult check_ancilla_clean(const Circuit& c, const InputDistribution& dist,
                                std::uint64_t budget = std::uint64_t{1} << 24, std::uint64_t samples = 100000,
                                std::uint64_t seed = 1);

std::uint64_t exact_budget_default();  // honours RO_EXACT_BUDGET

struct ExactMode {
  std::uint64_t budget = 0;  // 0 = exact_budget_default()
};
struct MonteCarloMode {
  std::uint64_t shots = 10000;
  std::uint64_t seed = 0;
};

struct PayoffEstimate {
  double p = 0;
  std::uint64_t hits = 0, total = 0;
  bool exact = false;
  double ci_lo = 0, ci_hi = 0;  // 95% Wilson interval in MC mode; equals p in exact mode
};

PayoffEstimate payoff_probability(const Circuit& c, const InputDistribution& dist,
                                  std::variant<ExactMode, MonteCarloMode> mode);

// Fills `s` with one draw from `dist`.
void sample_input(const Circuit& c, const InputDistribution& dist, BasisState& s, Rng& rng);

std::pair<double, double> wilson95(std::uint64_t hits, std::uint64_t total);

}  // namespace ro
