#include "ro/domains.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <tuple>
#include <unordered_map>

#include "ro/arith.hpp"
#include "ro/emulator.hpp"
#include "ro/rank_select.hpp"

namespace ro {

CellDist RolloutSpec::cell_dist(const Config& placed, unsigned cell) const {
  CellDist d;
  for (unsigned f = 0; f < dice_faces(); ++f) {
    const auto s = cell_next(placed, cell, f);
    unsigned k = 0;
    while (k < d.n && d.state[k] != s) ++k;
    if (k == d.n) {
      if (d.n == 2) throw std::logic_error("cell_dist: more than two outcomes");
      d.state[d.n++] = s;
    }
    ++d.faces[k];
  }
  return d;
}

bool RolloutSpec::payoff(const Config& c) const {
  int total = 0;
  for (auto s : c) total += cell_stat(s);
  return payoff_from_stat(total);
}

}  // namespace ro

namespace ro::domains {

std::vector<unsigned> neighbors(unsigned m, unsigned j) {
  const unsigned r = j / m, c = j % m;
  std::vector<unsigned> out;
  if (r > 0) out.push_back(j - m);
  if (c > 0) out.push_back(j - 1);
  if (c + 1 < m) out.push_back(j + 1);
  if (r + 1 < m) out.push_back(j + m);
  return out;
}

namespace {
std::vector<std::vector<unsigned>> neighbor_table(unsigned m) {
  if (m < 1 || m > 64) throw std::invalid_argument("grid side must be in [1, 64]");
  std::vector<std::vector<unsigned>> t;
  for (unsigned j = 0; j < m * m; ++j) t.push_back(neighbors(m, j));
  return t;
}

CellDist fixed(std::uint8_t s, unsigned faces) {
  CellDist d;
  d.state[0] = s;
  d.faces[0] = faces;
  d.n = 1;
  return d;
}

CellDist split(std::uint8_t hit, unsigned hit_faces, std::uint8_t miss, unsigned faces) {
  if (hit_faces == 0) return fixed(miss, faces);
  if (hit_faces >= faces) return fixed(hit, faces);
  CellDist d;
  d.state[0] = hit;
  d.faces[0] = hit_faces;
  d.state[1] = miss;
  d.faces[1] = faces - hit_faces;
  d.n = 2;
  return d;
}

std::vector<Control> eq(std::span<const Qubit> reg, std::uint64_t v) { return equals_const(reg, v); }

std::vector<Control> with(std::vector<Control> a, std::initializer_list<Control> more) {
  a.insert(a.end(), more);
  return a;
}
}  // namespace

// ---------------- Sway ----------------

Sway::Sway(unsigned m, unsigned horizon) : m_(m), h_(horizon), nbr_(neighbor_table(m)) {}

unsigned Sway::same_colour(const Config& c, unsigned cell) const {
  unsigned k = 0;
  for (auto n : nbr_[cell]) k += c[n] == c[cell];
  return k;
}

std::uint8_t Sway::cell_next(const Config& placed, unsigned cell, unsigned die) const {
  const auto s = placed[cell];
  if (s == 0) return 0;
  const unsigned k = same_colour(placed, cell);
  return die < 4 - std::min(k, 4u) ? static_cast<std::uint8_t>(3 - s) : s;
}

CellDist Sway::cell_dist(const Config& placed, unsigned cell) const {
  const auto s = placed[cell];
  if (s == 0) return fixed(0, 20);
  return split(static_cast<std::uint8_t>(3 - s), 4 - same_colour(placed, cell), s, 20);
}

void Sway::emit_mask(Builder& b, unsigned sel, std::span<const Qubit> prev,
                     const std::vector<std::span<const Qubit>>& earlier_outs, std::span<const Qubit> mask) const {
  for (unsigned j = 0; j < cells(); ++j) {
    auto c = cell(prev, j);
    b.mcx({Control{c[0], false}, Control{c[1], false}}, mask[j]);
    // White may not use the cell black just took.
    if (sel == 1) b.mcx(eq(earlier_outs.at(0), j), mask[j]);
  }
}

void Sway::emit_transition(Builder& b, const RoundRegs& r, std::span<const Qubit> scratch) const {
  const auto cnt = scratch.first(3);
  const Qubit occ = scratch[3];
  const auto& out_b = r.outs.at(0);
  const auto& out_w = r.outs.at(1);
  for (unsigned j = 0; j < cells(); ++j) {
    auto pj = cell(r.prev, j);
    auto nj = cell(r.next, j);
    const auto m0 = b.mark();
    // Same-colour neighbour count on the post-placement board, assembled from the previous
    // board and the two placement registers (neither changes during this phase).
    for (unsigned c = 0; c < 2; ++c) {
      const auto& out = c == 0 ? out_b : out_w;
      for (auto n : nbr_[j]) {
        auto pn = cell(r.prev, n);
        arith::increment(b, std::vector<Control>{{pj[c], true}, {pn[c], true}}, cnt);
        arith::increment(b, with(eq(out, n), {Control{pj[c], true}}), cnt);
        arith::increment(b, with(eq(out, j), {Control{pn[c], true}}), cnt);
      }
    }
    b.cx(pj[0], occ);
    b.cx(pj[1], occ);
    b.mcx(eq(out_b, j), occ);
    b.mcx(eq(out_w, j), occ);
    const auto m1 = b.mark();
    auto die = r.dice.subspan(static_cast<std::size_t>(j) * dice_bits(), dice_bits());
    const std::vector<Qubit> both{nj[0], nj[1]};
    for (unsigned kv = 0; kv < 4; ++kv)
      for (unsigned f = 0; f < 4 - kv; ++f) {
        auto ctl = eq(cnt, kv);
        ctl.push_back({occ, true});
        auto d = eq(die, f);
        ctl.insert(ctl.end(), d.begin(), d.end());
        b.mcx(ctl, both);
      }
    b.undo_range(m0, m1);
  }
}

void Sway::emit_eval(Builder& b, std::span<const Qubit> cfg, Qubit payoff, std::span<const Qubit> scratch) const {
  const unsigned w = width();
  const auto cnt = scratch.first(w + 1);
  const auto m0 = b.mark();
  for (unsigned j = 0; j < cells(); ++j) {
    auto c = cell(cfg, j);
    const Control blk{c[0], true}, wht{c[1], true};
    arith::increment(b, std::span(&blk, 1), cnt);
    arith::decrement(b, std::span(&wht, 1), cnt);
  }
  const auto m1 = b.mark();
  // payoff = (count >= 0) xor (count == 0), i.e. count > 0.
  b.mcx({Control{cnt[w], false}}, payoff);
  b.mcx(eq(cnt, 0), payoff);
  b.undo_range(m0, m1);
}

// ---------------- SIR ----------------

Sir::Sir(unsigned m, unsigned horizon, unsigned threshold, unsigned rho)
    : m_(m), h_(horizon), t_(threshold), rho_(rho), nbr_(neighbor_table(m)) {
  if (rho > 8) throw std::invalid_argument("rho must be in [0, 8]");
}

Config Sir::initial_config() const {
  Config c(cells(), 0);
  c[(m_ / 2) * m_ + m_ / 2] = 1;
  return c;
}

unsigned Sir::infected_neighbors(const Config& c, unsigned cell) const {
  unsigned k = 0;
  for (auto n : nbr_[cell]) k += c[n] == 1;
  return k;
}

std::uint8_t Sir::cell_next(const Config& placed, unsigned cell, unsigned die) const {
  switch (placed[cell]) {
    case 0: return die < infected_neighbors(placed, cell) ? 1 : 0;
    case 1: return die < rho_ ? 2 : 1;
    default: return placed[cell];
  }
}

CellDist Sir::cell_dist(const Config& placed, unsigned cell) const {
  switch (placed[cell]) {
    case 0: return split(1, infected_neighbors(placed, cell), 0, 8);
    case 1: return split(2, rho_, 1, 8);
    default: return fixed(placed[cell], 8);
  }
}

void Sir::emit_mask(Builder& b, unsigned, std::span<const Qubit> prev, const std::vector<std::span<const Qubit>>&,
                    std::span<const Qubit> mask) const {
  for (unsigned j = 0; j < cells(); ++j) {
    auto c = cell(prev, j);
    b.mcx({Control{c[0], false}, Control{c[1], false}}, mask[j]);
  }
}

void Sir::emit_transition(Builder& b, const RoundRegs& r, std::span<const Qubit> scratch) const {
  const auto cnt = scratch.first(3);
  for (unsigned j = 0; j < cells(); ++j) {
    auto pj = cell(r.prev, j);
    auto nj = cell(r.next, j);
    auto die = r.dice.subspan(static_cast<std::size_t>(j) * dice_bits(), dice_bits());
    const auto& nb = nbr_[j];
    const auto m0 = b.mark();
    for (auto n : nb) {
      const Control inf{cell(r.prev, n)[0], true};
      arith::increment(b, std::span(&inf, 1), cnt);
    }
    const auto m1 = b.mark();
    // Susceptible and not vaccinated this round: infected iff die < count.
    for (unsigned cv = 1; cv <= nb.size(); ++cv)
      for (unsigned f = 0; f < cv; ++f) {
        auto ctl = eq(cnt, cv);
        ctl.insert(ctl.end(), {Control{pj[0], false}, Control{pj[1], false}, Control{nj[1], false}});
        auto d = eq(die, f);
        ctl.insert(ctl.end(), d.begin(), d.end());
        b.mcx(ctl, nj[0]);
      }
    const std::vector<Qubit> both{nj[0], nj[1]};
    for (unsigned f = 0; f < rho_; ++f) b.mcx(with(eq(die, f), {Control{pj[0], true}}), both);
    b.undo_range(m0, m1);
  }
}

void Sir::emit_eval(Builder& b, std::span<const Qubit> cfg, Qubit payoff, std::span<const Qubit> scratch) const {
  const auto cnt = scratch.first(width());
  const auto m0 = b.mark();
  for (unsigned j = 0; j < cells(); ++j) {
    const Control inf{cell(cfg, j)[0], true};
    arith::increment(b, std::span(&inf, 1), cnt);
  }
  const auto m1 = b.mark();
  for (unsigned v = 0; v <= std::min(t_, cells()); ++v) b.mcx(eq(cnt, v), payoff);
  b.undo_range(m0, m1);
}

std::unique_ptr<RolloutSpec> make(std::string_view kind, unsigned m, unsigned horizon, unsigned threshold,
                                  unsigned rho) {
  if (kind == "sway") return std::make_unique<Sway>(m, horizon);
  if (kind == "epi" || kind == "sir") return std::make_unique<Sir>(m, horizon, threshold, rho);
  throw std::invalid_argument("unknown domain '" + std::string(kind) + "' (expected sway or epi)");
}

CellDist cell_distribution(const RolloutSpec& spec, const Config& placed, unsigned cell) {
  return spec.RolloutSpec::cell_dist(placed, cell);
}

// ---------------- classical rollouts ----------------

Branch sample_branch(const RolloutSpec& spec, Rng& rng) {
  Branch br;
  const std::uint64_t sel_range = std::uint64_t{1} << spec.width();
  br.selectors.resize(static_cast<std::size_t>(spec.horizon()) * spec.selectors_per_round());
  for (auto& s : br.selectors) s = rng.below(sel_range);
  br.dice.resize(static_cast<std::size_t>(spec.horizon()) * spec.cells());
  for (auto& d : br.dice) d = static_cast<std::uint16_t>(rng.below(spec.dice_faces()));
  return br;
}

namespace {
std::uint64_t select_on(const RolloutSpec& spec, const Config& board, std::uint64_t r) {
  std::uint64_t seen = 0;
  for (unsigned i = 0; i < board.size(); ++i)
    if (spec.valid(board, i) && seen++ == r) return i;
  return board.size();
}
}  // namespace

Config play_round(const RolloutSpec& spec, const Config& c, std::span<const std::uint64_t> selectors,
                  std::span<const std::uint16_t> dice, std::optional<std::uint64_t> arm,
                  std::vector<std::uint64_t>* picks) {
  Config placed = c;
  for (unsigned k = 0; k < spec.selectors_per_round(); ++k) {
    const std::uint64_t r = (k == 0 && arm) ? *arm : selectors[k];
    const auto j = select_on(spec, placed, r);
    if (picks) picks->push_back(j);
    if (j < placed.size()) placed[j] ^= static_cast<std::uint8_t>(1u << spec.action_bit(k));
  }
  Config next(c.size());
  for (unsigned j = 0; j < c.size(); ++j) next[j] = spec.cell_next(placed, j, dice[j]);
  return next;
}

Trajectory classical_rollout(const RolloutSpec& spec, const Config& init, std::span<const std::uint64_t> selectors,
                             std::span<const std::uint16_t> dice, std::optional<std::uint64_t> arm) {
  const unsigned H = spec.horizon(), S = spec.selectors_per_round(), N = spec.cells();
  if (init.size() != N) throw std::invalid_argument("classical_rollout: initial config has wrong cell count");
  if (selectors.size() != static_cast<std::size_t>(H) * S)
    throw std::invalid_argument("classical_rollout: selector stream length must be H * selectors_per_round");
  if (dice.size() != static_cast<std::size_t>(H) * N)
    throw std::invalid_argument("classical_rollout: dice stream length must be H * N");
  for (auto d : dice)
    if (d >= spec.dice_faces()) throw std::invalid_argument("classical_rollout: die face out of range");
  Trajectory t;
  t.boards.push_back(init);
  for (unsigned h = 0; h < H; ++h)
    t.boards.push_back(play_round(spec, t.boards.back(), selectors.subspan(static_cast<std::size_t>(h) * S, S),
                                  dice.subspan(static_cast<std::size_t>(h) * N, N), h == 0 ? arm : std::nullopt,
                                  &t.picks));
  t.payoff = spec.payoff(t.boards.back());
  return t;
}

Config sway_round(const Sway& s, const Config& c, std::uint64_t black, std::uint64_t white,
                  std::span<const std::uint16_t> dice) {
  const std::uint64_t sel[2] = {black, white};
  return play_round(s, c, sel, dice);
}

Config sir_round(const Sir& s, const Config& c, std::uint64_t selector, std::span<const std::uint16_t> dice) {
  return play_round(s, c, std::span(&selector, 1), dice);
}

// ---------------- exact DP ----------------

namespace {
std::uint64_t pack(const Config& c) {
  std::uint64_t v = 0;
  for (std::size_t j = 0; j < c.size(); ++j) v |= std::uint64_t{c[j]} << (2 * j);
  return v;
}
void unpack(std::uint64_t v, Config& c) {
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = static_cast<std::uint8_t>((v >> (2 * j)) & 3u);
}

struct Dp {
  Dp(const RolloutSpec& s, std::optional<std::uint64_t> a)
      : spec(s),
        N(s.cells()),
        S(s.selectors_per_round()),
        sel_weight(1.0 / static_cast<double>(std::uint64_t{1} << s.width())),
        face_weight(1.0 / s.dice_faces()),
        arm(a),
        inert(s.zero_is_inert()),
        D(s.dice_faces()),
        dist(N),
        conv(4 * N + 1, 0.0),
        tmp(4 * N + 1, 0.0),
        out(N, 0) {}

  const RolloutSpec& spec;
  unsigned N, S;
  double sel_weight;  // 2^-w
  double face_weight;  // 1/D
  std::optional<std::uint64_t> arm;
  bool inert;
  std::uint32_t D;
  bool first_round = false, last_round = false;
  std::unordered_map<std::uint64_t, double>* next = nullptr;
  double payoff_mass = 0;
  std::vector<CellDist> dist;
  std::vector<double> conv, tmp;
  Config out;

  // Enumerate placements for selector k on `board`, then hand the placed board to finish().
  void place(Config& board, unsigned k, double p) {
    if (k == S) return finish(board, p);
    if (k == 0 && first_round && arm) {
      const auto j = select_on(spec, board, *arm);
      if (j < N) {
        board[j] ^= static_cast<std::uint8_t>(1u << spec.action_bit(k));
        place(board, k + 1, p);
        board[j] ^= static_cast<std::uint8_t>(1u << spec.action_bit(k));
      } else {
        place(board, k + 1, p);
      }
      return;
    }
    std::vector<unsigned> valid;
    for (unsigned j = 0; j < N; ++j)
      if (spec.valid(board, j)) valid.push_back(j);
    const std::uint8_t bit = static_cast<std::uint8_t>(1u << spec.action_bit(k));
    for (auto j : valid) {
      board[j] ^= bit;
      place(board, k + 1, p * sel_weight);
      board[j] ^= bit;
    }
    const double sentinel = 1.0 - static_cast<double>(valid.size()) * sel_weight;
    if (sentinel > 0) place(board, k + 1, p * sentinel);
  }

  void finish(const Config& placed, double p) {
    if (!last_round) {
      for (unsigned j = 0; j < N; ++j)
        dist[j] = (inert && placed[j] == 0) ? CellDist{{0, 0}, {D, 0}, 1} : spec.cell_dist(placed, j);
      return expand(0, p);
    }
    // Distribution of the summed terminal statistic: deterministic cells shift it, random cells
    // are convolved in. Only indices in [lo, hi] (offset by N) are meaningful.
    const int off = static_cast<int>(N);
    int shift = 0, lo = 0, hi = 0;
    conv[off] = 1.0;
    for (unsigned j = 0; j < N; ++j) {
      if (inert && placed[j] == 0) continue;
      const auto d = spec.cell_dist(placed, j);
      if (d.n == 1) {
        shift += spec.cell_stat(d.state[0]);
        continue;
      }
      const int s0 = spec.cell_stat(d.state[0]), s1 = spec.cell_stat(d.state[1]);
      const double q0 = d.faces[0] * face_weight, q1 = d.faces[1] * face_weight;
      const int nlo = lo + std::min(s0, s1), nhi = hi + std::max(s0, s1);
      for (int v = nlo; v <= nhi; ++v) tmp[v + off] = 0.0;
      for (int v = lo; v <= hi; ++v) {
        const double c = conv[v + off];
        tmp[v + s0 + off] += c * q0;
        tmp[v + s1 + off] += c * q1;
      }
      conv.swap(tmp);
      lo = nlo;
      hi = nhi;
    }
    double win = 0;
    for (int v = lo; v <= hi; ++v)
      if (spec.payoff_from_stat(v + shift)) win += conv[v + off];
    payoff_mass += p * win;
  }

  void expand(unsigned j, double p) {
    if (j == N) {
      (*next)[pack(out)] += p;
      return;
    }
    const auto& d = dist[j];
    for (unsigned k = 0; k < d.n; ++k) {
      out[j] = d.state[k];
      expand(j + 1, p * (d.faces[k] * face_weight));
    }
  }
};
}  // namespace

double exact_value(const RolloutSpec& spec, const Config& init, std::optional<std::uint64_t> arm, std::uint64_t budget,
                   ExactStats* stats) {
  const unsigned N = spec.cells(), H = spec.horizon();
  if (init.size() != N) throw std::invalid_argument("exact_value: initial config has wrong cell count");
  if (N > 32) throw std::runtime_error("exact_value: more than 32 cells cannot be packed");
  if (budget == 0) budget = exact_budget_default();
  if (H == 0) return spec.payoff(init) ? 1.0 : 0.0;

  Dp dp(spec, arm);

  std::unordered_map<std::uint64_t, double> cur{{pack(init), 1.0}}, nxt;
  Config board(N);
  std::size_t peak = 1;
  for (unsigned h = 0; h < H; ++h) {
    dp.first_round = h == 0;
    dp.last_round = h + 1 == H;
    nxt.clear();
    dp.next = &nxt;
    for (const auto& [key, p] : cur) {
      unpack(key, board);
      dp.place(board, 0, p);
      if (nxt.size() > budget)
        throw std::runtime_error("exact_value: support exceeds budget of " + std::to_string(budget) + " configurations");
    }
    if (!dp.last_round) {
      cur.swap(nxt);
      peak = std::max(peak, cur.size());
    }
  }
  if (stats) stats->peak_support = peak;
  return dp.payoff_mass;
}

std::vector<double> arm_means(const RolloutSpec& spec, const Config& init, unsigned k, std::uint64_t budget) {
  std::vector<double> mu;
  for (unsigned j = 0; j < k; ++j) mu.push_back(exact_value(spec, init, j, budget));
  return mu;
}

McValue mc_value(const RolloutSpec& spec, const Config& init, std::uint64_t shots, std::uint64_t seed,
                 std::optional<std::uint64_t> arm) {
  McValue v;
  v.shots = shots;
  for (std::uint64_t s = 0; s < shots; ++s) {
    Rng rng(derive_seed(seed, s));
    auto br = sample_branch(spec, rng);
    v.hits += classical_rollout(spec, init, br.selectors, br.dice, arm).payoff;
  }
  v.p = shots ? static_cast<double>(v.hits) / static_cast<double>(shots) : 0.0;
  std::tie(v.ci_lo, v.ci_hi) = wilson95(v.hits, shots);
  return v;
}

// ---------------- text grids ----------------

namespace {
const char* symbols(const RolloutSpec& spec) { return spec.name() == "sway" ? ".BW" : "SIR"; }
}  // namespace

Config parse_grid(const RolloutSpec& spec, std::string_view text) {
  const char* sym = symbols(spec);
  Config c;
  std::size_t row_len = 0, rows = 0, cur = 0;
  auto end_row = [&] {
    if (cur == 0) return;
    if (rows == 0) row_len = cur;
    else if (cur != row_len) throw std::invalid_argument("grid rows have different lengths");
    ++rows;
    cur = 0;
  };
  for (char ch : text) {
    if (ch == '\n') {
      end_row();
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(ch))) continue;
    const char u = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    int s = -1;
    for (int k = 0; k < 3; ++k)
      if (sym[k] == u) s = k;
    if (s < 0) throw std::invalid_argument(std::string("unknown cell symbol '") + ch + "'");
    c.push_back(static_cast<std::uint8_t>(s));
    ++cur;
  }
  end_row();
  if (rows != spec.side() || row_len != spec.side())
    throw std::invalid_argument("grid must be " + std::to_string(spec.side()) + "x" + std::to_string(spec.side()));
  return c;
}

std::string format_grid(const RolloutSpec& spec, const Config& c) {
  const char* sym = symbols(spec);
  std::string s;
  for (unsigned j = 0; j < c.size(); ++j) {
    s += sym[c[j] & 3u];
    s += (j + 1) % spec.side() == 0 ? '\n' : ' ';
  }
  return s;
}

}  // namespace ro::domains
