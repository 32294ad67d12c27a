#include "ro/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ro/domains.hpp"
#include "ro/emulator.hpp"
#include "ro/oracle.hpp"

namespace ro::experiments {

namespace rs = ro::rank_select;

RsEquivalence rank_select_equivalence(unsigned n) {
  if (n == 0 || n > 16) throw std::invalid_argument("rank_select_equivalence: n must be in 1..16");
  RsEquivalence res;
  res.n = n;
  const Circuit scan = rs::build_scan(n), blocked = rs::build_blocked(n);
  const Program ps(scan), pb(blocked);
  const unsigned w = rs::width_for(n);
  auto run = [&](const Circuit& c, const Program& p, bool& ok, const char* name) {
    const auto mask = c.qubits("mask"), nth = c.qubits("nth"), out = c.qubits("out");
    const auto anc = c.qubits_with_role(Role::ancilla);
    BasisState s(c.total_qubits());
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
      for (std::uint64_t r = 0; r < (std::uint64_t{1} << w); ++r) {
        std::fill(s.words().begin(), s.words().end(), 0);
        s.write(mask, m);
        s.write(nth, r);
        p.run(s);
        const auto want = rs::select_semantics(m, n, r);
        const bool value_ok = s.read(out) == want && s.read(mask) == m && s.read(nth) == r;
        const bool clean = std::none_of(anc.begin(), anc.end(), [&](Qubit q) { return s.get(q); });
        if ((!value_ok || !clean) && res.detail.empty()) {
          std::ostringstream os;
          os << name << " n=" << n << " mask=" << m << " rank=" << r << " out=" << s.read(out) << " want=" << want
             << (clean ? "" : " (dirty ancilla)");
          res.detail = os.str();
        }
        ok = ok && value_ok;
        res.clean_ok = res.clean_ok && clean;
      }
  };
  run(scan, ps, res.scan_ok, "scan");
  run(blocked, pb, res.blocked_ok, "blocked");
  res.pairs = (std::uint64_t{1} << n) << w;
  return res;
}

std::vector<RsScalingRow> rank_select_scaling(const std::vector<unsigned>& ns) {
  std::vector<RsScalingRow> rows;
  for (unsigned n : ns) {
    RsScalingRow r;
    r.n = n;
    r.w = rs::width_for(n);
    r.scan_gates = rs::build_scan(n).gate_count();
    r.blocked_gates = rs::build_blocked(n).gate_count();
    r.scan_ratio = static_cast<double>(r.scan_gates) / (static_cast<double>(n) * r.w);
    r.blocked_ratio = static_cast<double>(r.blocked_gates) / (n * std::log2(std::max(r.w, 2u)));
    rows.push_back(r);
  }
  return rows;
}

std::optional<unsigned> blocked_crossover(const std::vector<RsScalingRow>& rows) {
  auto sorted = rows;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  std::optional<unsigned> from;
  for (auto it = sorted.rbegin(); it != sorted.rend() && it->blocked_gates < it->scan_gates; ++it) from = it->n;
  return from;
}

StructureCheck lower_bound_structure(rs::Variant v, unsigned n) {
  StructureCheck sc;
  sc.n = n;
  sc.variant = v;
  const Circuit c = rs::build(v, n);
  const auto mask = c.qubits("mask");
  const auto cone = light_cone(c, c.qubits("out"));
  sc.cone_covers_mask = std::all_of(mask.begin(), mask.end(),
                                    [&](Qubit q) { return std::binary_search(cone.begin(), cone.end(), q); });
  const auto pos = c.positions();
  const double kappa = static_cast<double>(cost(c).max_fan_in);
  const auto profile = crossing_profile(c);
  sc.min_crossing = SIZE_MAX;
  for (unsigned t = 1; t < n; ++t) {
    // The cut sits right after the t-th mask qubit in layout order.
    std::vector<std::size_t> mp;
    for (Qubit q : mask) mp.push_back(pos[q]);
    std::sort(mp.begin(), mp.end());
    const std::size_t cut = mp[t - 1] + 1;
    const std::size_t crossing = profile.at(cut - 1);
    const double bound = std::ceil(std::log2(static_cast<double>(std::min(t, n - t)))) / (2 * kappa);
    ++sc.cuts;
    sc.min_crossing = std::min(sc.min_crossing, crossing);
    sc.max_bound = std::max(sc.max_bound, bound);
    sc.crossing_ok = sc.crossing_ok && static_cast<double>(crossing) >= bound;
  }
  if (sc.cuts == 0) sc.min_crossing = 0;
  return sc;
}

std::string Instance::label() const {
  std::ostringstream os;
  os << m << "x" << m << " H=" << horizon;
  if (domain == "epi") os << " T=" << threshold << " rho=" << rho;
  return os.str();
}

std::unique_ptr<RolloutSpec> Instance::make() const { return domains::make(domain, m, horizon, threshold, rho); }

std::vector<std::pair<Instance, PublishedRow>> correctness_instances() {
  return {
      {Instance{"sway", 3, 2}, PublishedRow{169, 3079, 9768, 0.281, 0.028, 0.271}},
      {Instance{"sway", 5, 3}, PublishedRow{667, 18258, 55597, 0.337, 0.021, 0.325}},
      {Instance{"epi", 3, 2, 2, 2}, PublishedRow{146, 2383, 6472, 0.883, 0.020, 0.891}},
  };
}

CorrectnessRow correctness_row(const Instance& inst, std::uint64_t shots, std::uint64_t seed, std::uint64_t branches) {
  CorrectnessRow row;
  row.inst = inst;
  const auto spec = inst.make();
  const Circuit c = oracle::compose(*spec);
  const auto cr = cost(c);
  row.qubits = cr.qubit_count;
  row.depth = cr.depth;
  row.gates = cr.gate_count;
  row.max_live_ancilla = cr.max_live_ancilla;
  row.qubits_formula = oracle::qubit_cost_formula(*spec).total;
  row.gates_formula = oracle::gate_cost_formula(*spec, oracle::measure_fragments(*spec));
  const Config init = spec->initial_config();
  auto est = payoff_probability(c, oracle::input_distribution(*spec, c, init), MonteCarloMode{shots, seed});
  row.mc = est.p;
  row.mc_lo = est.ci_lo;
  row.mc_hi = est.ci_hi;
  row.shots = shots;
  row.exact = domains::exact_value(*spec, init);
  row.branches = branches;
  if (branches) {
    auto br = oracle::branchwise_check(*spec, c, init, branches, derive_seed(seed, 0xB4A4));
    row.branchwise_ok = br.ok;
    if (br.first) row.branch_detail = br.first->reg + ": " + br.first->detail;
  }
  return row;
}

std::vector<ScalingPoint> scaling_grid() { return {{5, 5}, {7, 5}, {10, 5}, {10, 10}, {20, 10}}; }

namespace {
struct PublishedScaling {
  unsigned m, h;
  std::size_t sway_q, epi_q, sway_g, epi_g;
};
constexpr PublishedScaling kPublished[] = {
    {5, 5, 916, 767, 76720, 56602},          {7, 5, 1708, 1452, 180615, 124735},
    {10, 5, 3363, 2893, 481201, 280230},     {10, 10, 6503, 5463, 793901, 558995},
    {20, 10, 25189, 21409, 6072641, 2592183},
};
}  // namespace

double ScalingRow::qubit_rel_diff() const {
  return published_qubits ? (static_cast<double>(qubits_formula) - published_qubits) / published_qubits : 0.0;
}

ScalingRow scaling_row(const std::string& domain, const ScalingPoint& pt, bool build) {
  if (domain != "sway" && domain != "epi") throw std::invalid_argument("scaling_row: unknown domain " + domain);
  ScalingRow row;
  row.domain = domain;
  row.m = pt.m;
  row.horizon = pt.horizon;
  row.n = pt.m * pt.m;
  const auto spec = domains::make(domain, pt.m, pt.horizon);
  const auto qb = oracle::qubit_cost_formula(*spec);
  row.qubits_formula = qb.total;
  row.q_config = qb.config;
  row.q_selectors = qb.selectors;
  row.q_dice = qb.dice;
  row.q_ancilla = qb.ancilla;
  row.gates_formula = oracle::gate_cost_formula(*spec, oracle::measure_fragments(*spec));
  if (build) {
    const Circuit c = oracle::compose(*spec);
    row.qubits_measured = c.total_qubits();
    row.gates_measured = c.gate_count();
  }
  for (const auto& p : kPublished)
    if (p.m == pt.m && p.h == pt.horizon) {
      row.published_qubits = domain == "sway" ? p.sway_q : p.epi_q;
      row.published_gates = domain == "sway" ? p.sway_g : p.epi_g;
    }
  return row;
}

std::vector<std::pair<unsigned, double>> rho_sweep(unsigned m, unsigned horizon, unsigned threshold) {
  std::vector<std::pair<unsigned, double>> out;
  for (unsigned rho = 0; rho <= 8; ++rho) {
    domains::Sir s(m, horizon, threshold, rho);
    out.emplace_back(rho, domains::exact_value(s, s.initial_config()));
  }
  return out;
}

}  // namespace ro::experiments
