#include "ro/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "ro/domains.hpp"
#include "ro/rng.hpp"

namespace ro::bounds {

namespace mp = boost::multiprecision;

void InfluenceModel::validate() const {
  if (kappa < 2) throw std::invalid_argument("influence model: kappa must be at least 2");
  if (!(p >= 0 && p <= 1)) throw std::invalid_argument("influence model: p must lie in [0,1]");
}

double decay_per_round(const InfluenceModel& m, unsigned d) {
  m.validate();
  if (d == 0) return 1.0;
  const double k = m.kappa;
  return std::min(1.0, k / (k - 1) * std::pow((k - 1) * m.p, static_cast<double>(d)));
}

double decay_cumulative(const InfluenceModel& m, unsigned d) {
  m.validate();
  if (d == 0) throw std::invalid_argument("decay_cumulative: d must be at least 1");
  if (d > m.horizon) return 0.0;
  // Terms kappa (kappa-1)^(l-1) C(H,l) are exact; p^l is carried in 100-digit binary floating point
  // so that H up to 64 neither overflows nor loses the small tail terms.
  using Big = mp::cpp_bin_float_100;
  Big sum = 0;
  const Big p = m.p;
  mp::cpp_int binom = 1;  // C(H, l), advanced incrementally
  for (unsigned l = 1; l <= m.horizon; ++l) {
    binom = binom * (m.horizon - l + 1) / l;
    if (l < d) continue;
    mp::cpp_int paths = mp::pow(mp::cpp_int(m.kappa - 1), l - 1) * m.kappa;
    sum += Big(paths * binom) * mp::pow(p, l);
    if (sum >= 1) return 1.0;
  }
  return sum.convert_to<double>();
}

unsigned manhattan(unsigned m, unsigned a, unsigned b) {
  const int ra = a / m, ca = a % m, rb = b / m, cb = b % m;
  return static_cast<unsigned>(std::abs(ra - rb) + std::abs(ca - cb));
}

PeripheralSet peripheral_set(unsigned m, unsigned horizon) {
  if (m == 0) throw std::invalid_argument("peripheral_set: m must be positive");
  PeripheralSet ps;
  ps.radius = horizon + 1;
  ps.anchor = (m / 2) * m + m / 2;
  for (unsigned j = 0; j < m * m; ++j)
    if (manhattan(m, j, ps.anchor) > ps.radius) ps.cells.push_back(j);
  const std::uint64_t r = ps.radius;
  ps.inequality = std::uint64_t{m} * m > 2 * r * r + 2 * r + 1;
  return ps;
}

InfluenceResult empirical_influence(const RolloutSpec& spec, const Config& base, unsigned site, std::uint8_t alt,
                                    unsigned action_cell, const InfluenceModel& model, std::uint64_t trials,
                                    std::uint64_t seed) {
  const unsigned N = spec.cells();
  if (base.size() != N || site >= N || action_cell >= N)
    throw std::invalid_argument("empirical_influence: site or board out of range");
  if (alt == base[site]) throw std::invalid_argument("empirical_influence: alternative equals the base value");
  if (trials == 0) throw std::invalid_argument("empirical_influence: trials must be positive");
  Config other = base;
  other[site] = alt;

  InfluenceResult res;
  res.distance = manhattan(spec.side(), site, action_cell);
  res.trials = trials;
  res.bound = res.distance == 0 ? 1.0 : decay_cumulative(model, res.distance);
  std::uint64_t reached = 0;
  std::int64_t diff = 0;
  std::uint64_t diff_sq = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    auto br = domains::sample_branch(spec, rng);
    auto a = domains::classical_rollout(spec, base, br.selectors, br.dice);
    auto b = domains::classical_rollout(spec, other, br.selectors, br.dice);
    bool hit = res.distance == 0;
    for (std::size_t h = 1; h < a.boards.size() && !hit; ++h) hit = a.boards[h][action_cell] != b.boards[h][action_cell];
    reached += hit;
    const int d = static_cast<int>(a.payoff) - static_cast<int>(b.payoff);
    diff += d;
    diff_sq += static_cast<std::uint64_t>(d * d);
  }
  const double n = static_cast<double>(trials);
  res.reach = reached / n;
  res.reach_se = std::sqrt(res.reach * (1 - res.reach) / n);
  res.payoff_delta = diff / n;
  res.payoff_se = std::sqrt(std::max(0.0, diff_sq / n - res.payoff_delta * res.payoff_delta) / n);
  res.ok = res.reach <= res.bound + 3 * res.reach_se;
  return res;
}

ValueOracle positional_arm_oracle(const RolloutSpec& spec, std::vector<unsigned> arm_cells, std::uint64_t budget) {
  for (unsigned c : arm_cells)
    if (c >= spec.cells()) throw std::invalid_argument("positional_arm_oracle: arm cell out of range");
  return [&spec, cells = std::move(arm_cells), budget](const Config& c) {
    std::vector<double> v;
    for (unsigned cell : cells) {
      if (!spec.valid(c, cell)) throw std::invalid_argument("positional_arm_oracle: arm cell is not a valid action");
      std::uint64_t rank = 0;
      for (unsigned j = 0; j < cell; ++j) rank += spec.valid(c, j);
      v.push_back(domains::exact_value(spec, c, rank, budget));
    }
    return v;
  };
}

namespace {

std::string describe(const std::vector<unsigned>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

}  // namespace

LiftingReport check_lifting(const LiftingWitness& w, const ValueOracle& values, std::uint64_t samples,
                            std::uint64_t seed, double tolerance) {
  LiftingReport rep;
  const std::size_t n = w.base.size();
  auto fail = [&](std::string msg) {
    rep.structural_ok = false;
    rep.structural_detail = std::move(msg);
    return rep;
  };
  if (w.alphabet < 1) return fail("alphabet is empty");
  if (w.delta.size() != n) return fail("delta has " + std::to_string(w.delta.size()) + " entries for " +
                                       std::to_string(n) + " factors");
  if (w.best >= w.supports.size()) return fail("best arm " + std::to_string(w.best) + " has no support region");
  for (auto v : w.base)
    if (v >= w.alphabet) return fail("base configuration uses a symbol outside the alphabet");
  std::set<unsigned> q(w.peripheral.begin(), w.peripheral.end());
  if (q.size() != w.peripheral.size()) return fail("peripheral set repeats a factor");
  for (unsigned p : q) {
    if (p >= n) return fail("peripheral factor " + std::to_string(p) + " out of range");
    if (w.delta[p] < 0) return fail("negative delta at factor " + std::to_string(p));
    rep.delta_sum += w.delta[p];
  }
  if (rep.delta_sum > w.eps + 1e-12)
    return fail("stability: sum of delta over Q is " + std::to_string(rep.delta_sum) + " > eps " + std::to_string(w.eps));
  std::vector<int> owner(n, -1);
  for (std::size_t i = 0; i < w.supports.size(); ++i)
    for (unsigned f : w.supports[i]) {
      if (f >= n) return fail("support of arm " + std::to_string(i) + " leaves the factor range");
      if (owner[f] >= 0 && owner[f] != static_cast<int>(i))
        return fail("modularity: supports of arms " + std::to_string(owner[f]) + " and " + std::to_string(i) +
                    " share factor " + std::to_string(f));
      owner[f] = static_cast<int>(i);
      if (q.count(f))
        return fail("modularity: factor " + std::to_string(f) + " is in Q and in the support of arm " +
                    std::to_string(i) + " {" + describe(w.supports[i]) + "}");
    }

  rep.modular = std::all_of(q.begin(), q.end(), [&](unsigned p) { return w.delta[p] == 0; });
  mp::cpp_int size = mp::pow(mp::cpp_int(w.alphabet), static_cast<unsigned>(q.size()));
  rep.family_size = size.str();

  rep.base_values = values(w.base);
  if (rep.base_values.size() != w.supports.size())
    throw std::invalid_argument("check_lifting: value oracle returned the wrong number of arms");
  for (std::size_t j = 0; j < rep.base_values.size(); ++j)
    if (j != w.best && rep.base_values[w.best] < rep.base_values[j] + 3 * w.eps - tolerance) {
      rep.base_gap_ok = false;
      rep.value_detail = "base gap: v_best " + std::to_string(rep.base_values[w.best]) + " < v_" + std::to_string(j) +
                         " + 3 eps";
      return rep;
    }

  const std::vector<unsigned> qv(q.begin(), q.end());
  auto check_member = [&](const Config& c) {
    ++rep.members_checked;
    auto v = values(c);
    for (std::size_t j = 0; j < v.size(); ++j) {
      const double shift = std::abs(v[j] - rep.base_values[j]);
      rep.max_value_shift = std::max(rep.max_value_shift, shift);
      if (rep.eps_optimal && v[w.best] < v[j] - w.eps - tolerance) {
        rep.eps_optimal = false;
        if (!rep.witness) rep.witness = c;
        rep.value_detail = "arm " + std::to_string(j) + " beats the best arm by more than eps";
      }
      if (rep.modular && rep.modular_equal && shift > tolerance) {
        rep.modular_equal = false;
        if (!rep.witness) rep.witness = c;
        if (rep.value_detail.empty())
          rep.value_detail = "value of arm " + std::to_string(j) + " moved by " + std::to_string(shift);
      }
    }
  };

  Config c = w.base;
  if (size <= 4096) {
    rep.exhaustive = true;
    const auto total = size.convert_to<std::uint64_t>();
    for (std::uint64_t idx = 0; idx < total; ++idx) {
      std::uint64_t x = idx;
      for (unsigned p : qv) {
        c[p] = static_cast<std::uint8_t>(x % w.alphabet);
        x /= w.alphabet;
      }
      check_member(c);
    }
    return rep;
  }
  for (unsigned s = 0; s < w.alphabet; ++s) {
    for (unsigned p : qv) c[p] = static_cast<std::uint8_t>(s);
    check_member(c);
  }
  for (std::uint64_t t = 0; t < samples; ++t) {
    Rng rng(derive_seed(seed, t));
    for (unsigned p : qv) c[p] = static_cast<std::uint8_t>(rng.below(w.alphabet));
    check_member(c);
  }
  return rep;
}

}  // namespace ro::bounds
