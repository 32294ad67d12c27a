#include "ro/bestarm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ro/rng.hpp"

namespace ro::bestarm {

namespace {

double xlogy(double x, double y) { return x == 0 ? 0.0 : x * std::log(y); }

std::uint64_t trial_seed(std::uint64_t root, unsigned k, double eps, unsigned trial) {
  return derive_seed(derive_seed(derive_seed(root, k), std::bit_cast<std::uint64_t>(eps)), trial);
}

struct MeanSd {
  double mean = 0, sd = 0;
};
MeanSd mean_sd(const std::vector<double>& v) {
  MeanSd r;
  if (v.empty()) return r;
  r.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  if (v.size() > 1) {
    double s = 0;
    for (double x : v) s += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(s / (v.size() - 1));
  }
  return r;
}

}  // namespace

double kl(double p, double q) {
  if (!(p >= 0 && p <= 1 && q >= 0 && q <= 1)) throw std::invalid_argument("kl: arguments must lie in [0,1]");
  if (p == q) return 0.0;
  if ((q == 0 && p > 0) || (q == 1 && p < 1)) return std::numeric_limits<double>::infinity();
  return xlogy(p, p / q) + xlogy(1 - p, (1 - p) / (1 - q));
}

double classical_lower_bound(unsigned k, double eps) {
  if (k < 2) throw std::invalid_argument("classical_lower_bound: k must be at least 2");
  if (!(eps > 0 && eps <= 0.125)) throw std::invalid_argument("classical_lower_bound: eps must lie in (0, 1/8]");
  return (k - 1) * std::log(2.0) / (288.0 * eps * eps);
}

unsigned BanditInstance::best() const {
  return static_cast<unsigned>(std::max_element(means.begin(), means.end()) - means.begin());
}

BanditInstance hard_instance(unsigned k, double eps, std::optional<unsigned> alternative) {
  if (k == 0) throw std::invalid_argument("hard_instance: k must be positive");
  if (!(eps > 0)) throw std::invalid_argument("hard_instance: eps must be positive");
  if (alternative && (*alternative == 0 || *alternative >= k))
    throw std::invalid_argument("hard_instance: alternative arm must be in 1..k-1");
  BanditInstance in;
  in.eps = eps;
  in.alternative = alternative;
  in.means.assign(k, 0.5);
  in.means[0] = 0.5 + 4 * eps;
  if (alternative) in.means[*alternative] = 0.5 + 6 * eps;
  for (double& m : in.means)
    if (m > 1) {
      m = 1;
      in.clipped = true;
    }
  return in;
}

QueryLedger classical_baseline(const BanditInstance& inst, double eps, std::uint64_t seed, double delta) {
  const unsigned k = inst.k();
  QueryLedger led;
  led.pulls.assign(k, 0);
  const double top = *std::max_element(inst.means.begin(), inst.means.end());
  if (k == 1) {
    led.correct = true;
    return led;
  }
  std::vector<Rng> arm_rng;
  arm_rng.reserve(k);
  for (unsigned i = 0; i < k; ++i) arm_rng.emplace_back(derive_seed(seed, i));
  std::vector<unsigned> active(k);
  std::iota(active.begin(), active.end(), 0u);
  std::vector<std::uint64_t> wins(k, 0);

  for (std::uint64_t t = 1;; ++t) {
    for (unsigned i : active) {
      wins[i] += arm_rng[i].bernoulli(inst.means[i]);
      ++led.pulls[i];
      ++led.oracle_calls;
    }
    // Epoch r covers t in (2^(r-1), 2^r]; the maximal Hoeffding inequality over the epoch with
    // confidence delta / (4 k r^2) per arm and side.
    const unsigned r = std::bit_width(t - 1) + 0u;
    const double T = std::ldexp(1.0, static_cast<int>(r));
    const double L = std::log(4.0 * k * (r + 1.0) * (r + 1.0) / delta);
    const double rad = std::sqrt(T * L / 2) / static_cast<double>(t);
    double lead = -1;
    for (unsigned i : active) lead = std::max(lead, static_cast<double>(wins[i]) / t);
    std::erase_if(active, [&](unsigned i) { return static_cast<double>(wins[i]) / t + rad < lead - rad; });
    if (active.size() == 1 || rad < eps / 2) {
      led.chosen = *std::max_element(active.begin(), active.end(),
                                     [&](unsigned a, unsigned b) { return wins[a] < wins[b]; });
      break;
    }
  }
  led.correct = inst.means[led.chosen] >= top - eps;
  return led;
}

QueryLedger quantum_accounting(const BanditInstance& inst, double eps, std::uint64_t seed, const QuantumConstants& qc) {
  const unsigned k = inst.k();
  QueryLedger led;
  const std::uint64_t ae_calls = static_cast<std::uint64_t>(std::ceil(qc.c_ae / eps));
  const double top = *std::max_element(inst.means.begin(), inst.means.end());
  auto charge = [&](std::uint64_t comparisons) {
    led.comparisons += comparisons;
    led.oracle_calls += comparisons * ae_calls;
  };
  if (k == 1) {
    charge(1);
    led.correct = true;
    return led;
  }

  // Amplitude-estimation outputs: exact mean plus a fixed seeded error strictly inside (-eps/2, eps/2).
  std::vector<double> est(k);
  for (unsigned i = 0; i < k; ++i) {
    Rng r(derive_seed(seed, i));
    est[i] = inst.means[i] + (r.unit() - 0.5) * eps * (1 - 1e-9);
  }

  Rng rng(derive_seed(seed, 0xD17Full));
  const double lg = std::log2(static_cast<double>(k));
  const auto budget = static_cast<std::uint64_t>(std::ceil(qc.c_dh * std::sqrt(static_cast<double>(k)) + qc.c_log * lg * lg));
  unsigned y = static_cast<unsigned>(rng.below(k));
  std::uint64_t used = 0;
  std::vector<unsigned> marked;
  // Each threshold update runs a BBHT search with unknown marked count.
  while (used < budget) {
    marked.clear();
    for (unsigned i = 0; i < k; ++i)
      if (est[i] > est[y]) marked.push_back(i);
    const double theta = std::asin(std::sqrt(static_cast<double>(marked.size()) / k));
    double m = 1;
    const double lambda = 6.0 / 5.0, cap = std::sqrt(static_cast<double>(k));
    bool found = false;
    while (used < budget && !found) {
      const auto j = rng.below(static_cast<std::uint64_t>(std::floor(m)));
      const std::uint64_t cost = std::min<std::uint64_t>(j + 1, budget - used);  // j iterations plus one check
      used += cost;
      if (cost < j + 1) break;
      const double s = std::sin((2.0 * j + 1) * theta);
      if (!marked.empty() && rng.bernoulli(s * s)) {
        y = marked[rng.below(marked.size())];
        found = true;
      } else {
        m = std::min(lambda * m, cap);
      }
    }
  }
  charge(used);
  led.chosen = y;
  led.correct = inst.means[y] >= top - eps;
  return led;
}

std::vector<double> least_squares(const std::vector<std::vector<double>>& x, const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n == 0) throw std::invalid_argument("least_squares: no observations");
  const std::size_t p = x.empty() ? 0 : x.size();
  for (const auto& col : x)
    if (col.size() != n) throw std::invalid_argument("least_squares: ragged design");
  // Normal equations on centred data, solved by Gaussian elimination with partial pivoting.
  std::vector<double> mx(p), xc;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  for (std::size_t j = 0; j < p; ++j) mx[j] = std::accumulate(x[j].begin(), x[j].end(), 0.0) / n;
  std::vector<std::vector<double>> a(p, std::vector<double>(p + 1, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < p; ++r) {
      const double xr = x[r][i] - mx[r];
      for (std::size_t c = 0; c < p; ++c) a[r][c] += xr * (x[c][i] - mx[c]);
      a[r][p] += xr * (y[i] - my);
    }
  for (std::size_t c = 0; c < p; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < p; ++r)
      if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
    if (std::abs(a[piv][c]) < 1e-12) throw std::invalid_argument("least_squares: singular design");
    std::swap(a[c], a[piv]);
    for (std::size_t r = 0; r < p; ++r) {
      if (r == c) continue;
      const double f = a[r][c] / a[c][c];
      for (std::size_t q = c; q <= p; ++q) a[r][q] -= f * a[c][q];
    }
  }
  std::vector<double> beta(p);
  for (std::size_t j = 0; j < p; ++j) beta[j] = a[j][p] / a[j][j];
  return beta;
}

SeparationReport separation_report(const std::vector<unsigned>& ks, const std::vector<double>& eps, unsigned trials,
                                   std::uint64_t seed, const QuantumConstants& qc) {
  if (ks.empty() || eps.empty()) throw std::invalid_argument("separation_report: empty grid");
  if (trials == 0) throw std::invalid_argument("separation_report: trials must be positive");
  SeparationReport rep;
  std::vector<double> lk, le, lc, lq;
  for (unsigned k : ks)
    for (double e : eps) {
      auto inst = hard_instance(k, e);
      SeparationRow row;
      row.k = k;
      row.eps = e;
      row.valid = !inst.clipped;
      row.lower_bound = row.valid && k >= 2 ? classical_lower_bound(k, e) : std::numeric_limits<double>::quiet_NaN();
      std::vector<double> cc, qq;
      unsigned cs = 0, qs = 0;
      for (unsigned t = 0; t < trials; ++t) {
        const auto s = trial_seed(seed, k, e, t);
        auto c = classical_baseline(inst, e, derive_seed(s, 1));
        auto q = quantum_accounting(inst, e, derive_seed(s, 2), qc);
        cc.push_back(static_cast<double>(c.oracle_calls));
        qq.push_back(static_cast<double>(q.oracle_calls));
        cs += c.correct;
        qs += q.correct;
      }
      const auto mc = mean_sd(cc), mq = mean_sd(qq);
      row.classical_mean = mc.mean;
      row.classical_sd = mc.sd;
      row.quantum_mean = mq.mean;
      row.quantum_sd = mq.sd;
      row.classical_success = static_cast<double>(cs) / trials;
      row.quantum_success = static_cast<double>(qs) / trials;
      rep.rows.push_back(row);
      if (row.valid && k >= 2 && mc.mean > 0) {
        lk.push_back(std::log(k));
        le.push_back(std::log(1 / e));
        lc.push_back(std::log(mc.mean));
        lq.push_back(std::log(mq.mean));
      }
    }
  rep.slopes.rows_used = lk.size();
  std::vector<std::vector<double>> design;
  if (std::adjacent_find(lk.begin(), lk.end(), std::not_equal_to<>()) != lk.end()) design.push_back(lk);
  const bool vary_k = !design.empty();
  if (std::adjacent_find(le.begin(), le.end(), std::not_equal_to<>()) != le.end()) design.push_back(le);
  const bool vary_e = design.size() > (vary_k ? 1u : 0u);
  if (!design.empty() && lk.size() > design.size()) {
    auto bc = least_squares(design, lc), bq = least_squares(design, lq);
    std::size_t j = 0;
    if (vary_k) {
      rep.slopes.classical_k = bc[j];
      rep.slopes.quantum_k = bq[j];
      ++j;
    }
    if (vary_e) {
      rep.slopes.classical_inv_eps = bc[j];
      rep.slopes.quantum_inv_eps = bq[j];
    }
  }
  return rep;
}

TransportReport transport_check(unsigned k, double eps, unsigned trials, std::uint64_t seed) {
  if (k < 2 || trials < 2) throw std::invalid_argument("transport_check: need k >= 2 and trials >= 2");
  TransportReport rep;
  const double den = 0.5 + 6 * eps <= 1 ? kl(0.5, 0.5 + 6 * eps) : std::numeric_limits<double>::infinity();
  rep.ratio = kl(1.0 / 3, 2.0 / 3) / den;
  auto inst = hard_instance(k, eps);
  std::vector<std::vector<double>> pulls(k);
  for (unsigned t = 0; t < trials; ++t) {
    auto led = classical_baseline(inst, eps, derive_seed(trial_seed(seed, k, eps, t), 1));
    for (unsigned j = 0; j < k; ++j) pulls[j].push_back(static_cast<double>(led.pulls[j]));
  }
  for (unsigned j = 1; j < k; ++j) {
    const auto ms = mean_sd(pulls[j]);
    TransportArm a{j, ms.mean, ms.sd / std::sqrt(static_cast<double>(trials)), true};
    a.ok = a.mean_pulls + 3 * a.se >= rep.ratio;
    rep.ok = rep.ok && a.ok;
    rep.arms.push_back(a);
  }
  return rep;
}

}  // namespace ro::bestarm
