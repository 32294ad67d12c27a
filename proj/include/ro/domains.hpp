#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ro/rng.hpp"
#include "ro/rollout_spec.hpp"

namespace ro::domains {

// Orthogonal neighbours of cell j on an m x m grid, in the order up, left, right, down.
std::vector<unsigned> neighbors(unsigned m, unsigned j);

class Sway : public RolloutSpec {
 public:
  Sway(unsigned m, unsigned horizon);
  std::string name() const override { return "sway"; }
  unsigned side() const override { return m_; }
  unsigned horizon() const override { return h_; }
  unsigned dice_bits() const override { return 5; }
  unsigned dice_faces() const override { return 20; }
  unsigned selectors_per_round() const override { return 2; }
  Config initial_config() const override { return Config(cells(), 0); }

  unsigned action_bit(unsigned sel) const override { return sel == 0 ? 0 : 1; }
  std::uint8_t cell_next(const Config& placed, unsigned cell, unsigned die) const override;
  int cell_stat(std::uint8_t s) const override { return s == 1 ? 1 : s == 2 ? -1 : 0; }
  bool payoff_from_stat(int total) const override { return total > 0; }
  bool zero_is_inert() const override { return true; }
  CellDist cell_dist(const Config& placed, unsigned cell) const override;

  void emit_mask(Builder& b, unsigned sel, std::span<const Qubit> prev,
                 const std::vector<std::span<const Qubit>>& earlier_outs, std::span<const Qubit> mask) const override;
  unsigned transition_scratch() const override { return 4; }
  void emit_transition(Builder& b, const RoundRegs& r, std::span<const Qubit> scratch) const override;
  unsigned eval_scratch() const override { return width() + 1; }
  void emit_eval(Builder& b, std::span<const Qubit> cfg, Qubit payoff, std::span<const Qubit> scratch) const override;

  // Same-colour orthogonal neighbours of an occupied cell.
  unsigned same_colour(const Config& c, unsigned cell) const;

 private:
  unsigned m_, h_;
  std::vector<std::vector<unsigned>> nbr_;
};

class Sir : public RolloutSpec {
 public:
  Sir(unsigned m, unsigned horizon, unsigned threshold, unsigned rho = 2);
  std::string name() const override { return "epi"; }
  unsigned side() const override { return m_; }
  unsigned horizon() const override { return h_; }
  unsigned dice_bits() const override { return 3; }
  unsigned dice_faces() const override { return 8; }
  unsigned selectors_per_round() const override { return 1; }
  // A single infected cell at (floor(m/2), floor(m/2)).
  Config initial_config() const override;

  unsigned action_bit(unsigned) const override { return 1; }
  std::uint8_t cell_next(const Config& placed, unsigned cell, unsigned die) const override;
  int cell_stat(std::uint8_t s) const override { return s == 1 ? 1 : 0; }
  bool payoff_from_stat(int total) const override { return total <= static_cast<int>(t_); }
  CellDist cell_dist(const Config& placed, unsigned cell) const override;

  void emit_mask(Builder& b, unsigned sel, std::span<const Qubit> prev,
                 const std::vector<std::span<const Qubit>>& earlier_outs, std::span<const Qubit> mask) const override;
  unsigned transition_scratch() const override { return 3; }
  void emit_transition(Builder& b, const RoundRegs& r, std::span<const Qubit> scratch) const override;
  unsigned eval_scratch() const override { return width(); }
  void emit_eval(Builder& b, std::span<const Qubit> cfg, Qubit payoff, std::span<const Qubit> scratch) const override;

  unsigned threshold() const { return t_; }
  unsigned rho() const { return rho_; }
  unsigned infected_neighbors(const Config& c, unsigned cell) const;

 private:
  unsigned m_, h_, t_, rho_;
  std::vector<std::vector<unsigned>> nbr_;
};

// Factory used by the CLI: kind is "sway" or "epi".
std::unique_ptr<RolloutSpec> make(std::string_view kind, unsigned m, unsigned horizon, unsigned threshold = 2,
                                  unsigned rho = 2);

// Brute-force per-cell distribution: tallies cell_next over every die face.
CellDist cell_distribution(const RolloutSpec& spec, const Config& placed, unsigned cell);

// ---- classical rollouts ----

// Selector and dice values of one branch. selectors: H * selectors_per_round entries, round-major;
// dice: H * N faces, round-major.
struct Branch {
  std::vector<std::uint64_t> selectors;
  std::vector<std::uint16_t> dice;
};
Branch sample_branch(const RolloutSpec& spec, Rng& rng);

struct Trajectory {
  std::vector<Config> boards;       // H + 1 boards, boards[0] = initial
  std::vector<std::uint64_t> picks;  // rank-select result per selector (N = no action)
  bool payoff = false;
};

// One round. `arm`, when set, replaces the value of selector 0.
Config play_round(const RolloutSpec& spec, const Config& c, std::span<const std::uint64_t> selectors,
                  std::span<const std::uint16_t> dice, std::optional<std::uint64_t> arm = {},
                  std::vector<std::uint64_t>* picks = nullptr);

// Throws std::invalid_argument on stream length mismatch or out-of-range faces.
Trajectory classical_rollout(const RolloutSpec& spec, const Config& init, std::span<const std::uint64_t> selectors,
                             std::span<const std::uint16_t> dice, std::optional<std::uint64_t> arm = {});

// Convenience wrappers matching the per-domain round descriptions.
Config sway_round(const Sway& s, const Config& c, std::uint64_t black, std::uint64_t white,
                  std::span<const std::uint16_t> dice);
Config sir_round(const Sir& s, const Config& c, std::uint64_t selector, std::span<const std::uint16_t> dice);

// ---- values ----

struct ExactStats {
  std::size_t peak_support = 0;  // largest number of distinct configurations held between rounds
};

// Exact payoff probability by dynamic programming over configuration distributions. Selectors are
// uniform over 2^w (out-of-range values are the no-op); dice are uniform over faces. `budget`
// bounds the support size (0 = exact_budget_default()); std::runtime_error when exceeded.
double exact_value(const RolloutSpec& spec, const Config& init, std::optional<std::uint64_t> arm = {},
                   std::uint64_t budget = 0, ExactStats* stats = nullptr);

// mu_j for j < k: exact value with arm j fixing round-1 selector 0.
std::vector<double> arm_means(const RolloutSpec& spec, const Config& init, unsigned k, std::uint64_t budget = 0);

struct McValue {
  double p = 0;
  std::uint64_t hits = 0, shots = 0;
  double ci_lo = 0, ci_hi = 0;
};
McValue mc_value(const RolloutSpec& spec, const Config& init, std::uint64_t shots, std::uint64_t seed,
                 std::optional<std::uint64_t> arm = {});

// ---- text grids ----
// Rows of cell symbols ('.', 'B', 'W' for sway; 'S', 'I', 'R' for epi); blanks between symbols are ignored.
Config parse_grid(const RolloutSpec& spec, std::string_view text);
std::string format_grid(const RolloutSpec& spec, const Config& c);

}  // namespace ro::domains
