// rollout: command-line front end. Exit codes: 0 success, 1 validation failure, 2 bad arguments.

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "ro/bestarm.hpp"
#include "ro/bounds.hpp"
#include "ro/domains.hpp"
#include "ro/emulator.hpp"
#include "ro/experiments.hpp"
#include "ro/oracle.hpp"
#include "ro/rank_select.hpp"
#include "ro/report.hpp"

using namespace ro;
using report::Column;
using report::num;
using P = report::Provenance;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string join(const std::vector<std::string>& v, const char* sep = ";") {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

// Every option of the subcommand in declaration order, with its parsed or default value.
report::Manifest manifest_for(const CLI::App* sub, const std::string& out) {
  report::Manifest m;
  m.subcommand = sub->get_parent()->get_name() + " " + sub->get_name();
  for (const CLI::Option* o : sub->get_options()) {
    if (o->get_name() == "--help") continue;
    std::string value = o->count() ? join(o->reduced_results(), ",") : o->get_default_str();
    if (o->get_name() == "--seed") {
      if (o->count()) m.seed = std::stoull(value);
      continue;
    }
    if (o->get_name() == "--out") continue;
    m.params.emplace_back(o->get_name(), value);
  }
  m.outputs.push_back(out.empty() ? "stdout" : out);
  return m;
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) throw UsageError("cannot open output file " + out);
  f << text;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot read " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

std::string yes(bool b) { return b ? "1" : "0"; }

struct DomainArgs {
  std::string domain = "epi";
  unsigned m = 3, horizon = 2, threshold = 2, rho = 2;
  std::string grid;
  void add(CLI::App* a) {
    a->add_option("--domain", domain, "sway or epi")->check(CLI::IsMember({"sway", "epi"}))->capture_default_str();
    a->add_option("--m", m, "grid side")->check(CLI::Range(1u, 64u))->capture_default_str();
    a->add_option("--H", horizon, "horizon")->check(CLI::Range(0u, 64u))->capture_default_str();
    a->add_option("--T", threshold, "epi payoff threshold")->capture_default_str();
    a->add_option("--rho", rho, "epi recovery faces out of 8")->check(CLI::Range(0u, 8u))->capture_default_str();
    a->add_option("--grid", grid, "initial board file (rows of . B W or S I R)");
  }
  std::unique_ptr<RolloutSpec> spec() const { return domains::make(domain, m, horizon, threshold, rho); }
  Config init(const RolloutSpec& s) const { return grid.empty() ? s.initial_config() : domains::parse_grid(s, slurp(grid)); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reversible rollout oracles: rank-select, oracle composition, domains, best-arm accounting, bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(report::kToolVersion));
  std::string out;
  int status = 0;
  std::function<void()> action;
  auto add_out = [&](CLI::App* a) { a->add_option("--out", out, "CSV output path (default stdout)"); };

  // ---- ranksel ----
  auto* ranksel = app.add_subcommand("ranksel", "rank-select circuits")->require_subcommand(1);
  unsigned rs_nmax = 8;
  auto* rs_validate = ranksel->add_subcommand("validate", "exhaustive scan/blocked/semantics equivalence");
  rs_validate->add_option("--n-max", rs_nmax)->check(CLI::Range(1u, 12u))->capture_default_str();
  add_out(rs_validate);
  rs_validate->callback([&] {
    action = [&] {
      report::Table t({{"n", P::input}, {"pairs", P::measured}, {"scan_ok", P::measured}, {"blocked_ok", P::measured},
                       {"ancilla_clean", P::measured}, {"detail", P::measured}});
      for (unsigned n = 1; n <= rs_nmax; ++n) {
        auto r = experiments::rank_select_equivalence(n);
        t.add_row({std::to_string(n), std::to_string(r.pairs), yes(r.scan_ok), yes(r.blocked_ok), yes(r.clean_ok),
                   r.detail});
        if (!r.ok()) status = 1;
      }
      emit(t.csv(manifest_for(rs_validate, out)), out);
    };
  });

  unsigned rs_n = 8;
  std::string rs_variant = "scan", rs_json;
  auto* rs_build = ranksel->add_subcommand("build", "build one rank-select circuit and report its costs");
  rs_build->add_option("--n", rs_n)->check(CLI::Range(1u, 1u << 20))->capture_default_str();
  rs_build->add_option("--variant", rs_variant)->check(CLI::IsMember({"scan", "blocked"}))->capture_default_str();
  rs_build->add_option("--json", rs_json, "write the circuit as JSON");
  add_out(rs_build);
  rs_build->callback([&] {
    action = [&] {
      const auto v = rs_variant == "scan" ? rank_select::Variant::scan : rank_select::Variant::blocked;
      const Circuit c = rank_select::build(v, rs_n);
      const auto cr = cost(c);
      report::Table t({{"n", P::input}, {"variant", P::input}, {"w", P::derived}, {"qubits", P::measured},
                       {"gates", P::measured}, {"depth", P::measured}, {"max_fan_in", P::measured},
                       {"max_live_ancilla", P::measured}});
      t.add_row({std::to_string(rs_n), rs_variant, std::to_string(rank_select::width_for(rs_n)),
                 std::to_string(cr.qubit_count), std::to_string(cr.gate_count), std::to_string(cr.depth),
                 std::to_string(cr.max_fan_in), std::to_string(cr.max_live_ancilla)});
      auto m = manifest_for(rs_build, out);
      if (!rs_json.empty()) {
        emit(to_json(c), rs_json);
        m.outputs.push_back(rs_json);
      }
      emit(t.csv(m), out);
    };
  });

  unsigned rs_scale_max = 16384;
  auto* rs_scaling = ranksel->add_subcommand("scaling", "gate counts of both variants over powers of two");
  rs_scaling->add_option("--n-max", rs_scale_max)->check(CLI::Range(2u, 1u << 16))->capture_default_str();
  add_out(rs_scaling);
  rs_scaling->callback([&] {
    action = [&] {
      std::vector<unsigned> ns;
      for (unsigned n = 2; n <= rs_scale_max; n *= 2) ns.push_back(n);
      const auto rows = experiments::rank_select_scaling(ns);
      report::Table t({{"n", P::input}, {"w", P::derived}, {"scan_gates", P::measured},
                       {"blocked_gates", P::measured}, {"scan_per_nw", P::derived},
                       {"blocked_per_nlogw", P::derived}, {"blocked_below_scan", P::derived}});
      for (const auto& r : rows)
        t.add_row({std::to_string(r.n), std::to_string(r.w), std::to_string(r.scan_gates),
                   std::to_string(r.blocked_gates), num(r.scan_ratio, 4), num(r.blocked_ratio, 4),
                   yes(r.blocked_gates < r.scan_gates)});
      emit(t.csv(manifest_for(rs_scaling, out)), out);
    };
  });

  std::vector<unsigned> st_ns{4, 8, 16, 32};
  auto* rs_structure = ranksel->add_subcommand("structure", "light-cone coverage and mask-cut crossing counts");
  rs_structure->add_option("--n", st_ns)->delimiter(',')->capture_default_str();
  add_out(rs_structure);
  rs_structure->callback([&] {
    action = [&] {
      report::Table t({{"n", P::input}, {"variant", P::input}, {"cone_covers_mask", P::measured},
                       {"cuts", P::measured}, {"min_crossing", P::measured}, {"max_bound", P::formula},
                       {"crossing_ok", P::measured}});
      for (unsigned n : st_ns)
        for (auto v : {rank_select::Variant::scan, rank_select::Variant::blocked}) {
          auto s = experiments::lower_bound_structure(v, n);
          t.add_row({std::to_string(n), v == rank_select::Variant::scan ? "scan" : "blocked",
                     yes(s.cone_covers_mask), std::to_string(s.cuts), std::to_string(s.min_crossing),
                     num(s.max_bound, 4), yes(s.crossing_ok)});
          if (!s.ok()) status = 1;
        }
      emit(t.csv(manifest_for(rs_structure, out)), out);
    };
  });

  // ---- oracle ----
  auto* oracle_cmd = app.add_subcommand("oracle", "composed rollout oracles")->require_subcommand(1);
  DomainArgs od;
  unsigned o_arms = 0;
  std::string o_json;
  auto* o_build = oracle_cmd->add_subcommand("build", "compose an oracle and compare counts with the formulas");
  od.add(o_build);
  o_build->add_option("--arms", o_arms, "arm register size (0 = none)")->capture_default_str();
  o_build->add_option("--json", o_json, "write the circuit as JSON");
  add_out(o_build);
  o_build->callback([&] {
    action = [&] {
      const auto spec = od.spec();
      const oracle::ComposeOptions opt{o_arms};
      const Circuit c = oracle::compose(*spec, opt);
      const auto cr = cost(c);
      const auto qb = oracle::qubit_cost_formula(*spec, opt);
      const auto gf = oracle::gate_cost_formula(*spec, oracle::measure_fragments(*spec, opt), opt);
      report::Table t({{"domain", P::input}, {"m", P::input}, {"H", P::input}, {"qubits", P::measured},
                       {"qubits", P::formula}, {"config", P::formula}, {"selectors", P::formula},
                       {"dice", P::formula}, {"arm", P::formula}, {"ancilla", P::formula},
                       {"gates", P::measured}, {"gates", P::formula}, {"depth", P::measured},
                       {"max_live_ancilla", P::measured}});
      t.add_row({od.domain, std::to_string(od.m), std::to_string(od.horizon), std::to_string(cr.qubit_count),
                 std::to_string(qb.total), std::to_string(qb.config), std::to_string(qb.selectors),
                 std::to_string(qb.dice), std::to_string(qb.arm), std::to_string(qb.ancilla),
                 std::to_string(cr.gate_count), std::to_string(gf), std::to_string(cr.depth),
                 std::to_string(cr.max_live_ancilla)});
      if (cr.qubit_count != qb.total || cr.gate_count != gf) status = 1;
      auto m = manifest_for(o_build, out);
      if (!o_json.empty()) {
        emit(to_json(c), o_json);
        m.outputs.push_back(o_json);
      }
      emit(t.csv(m), out);
    };
  });

  DomainArgs oc;
  std::uint64_t oc_branches = 1000, oc_seed = 0;
  auto* o_check = oracle_cmd->add_subcommand("check", "branchwise comparison against classical rollouts");
  oc.add(o_check);
  o_check->add_option("--branches", oc_branches)->check(CLI::PositiveNumber)->capture_default_str();
  o_check->add_option("--seed", oc_seed)->required();
  add_out(o_check);
  o_check->callback([&] {
    action = [&] {
      const auto spec = oc.spec();
      const Circuit c = oracle::compose(*spec);
      auto r = oracle::branchwise_check(*spec, c, oc.init(*spec), oc_branches, oc_seed);
      report::Table t({{"domain", P::input}, {"m", P::input}, {"H", P::input}, {"branches", P::measured},
                       {"ok", P::measured}, {"first_mismatch", P::measured}});
      std::string detail;
      if (r.first)
        detail = "branch " + std::to_string(r.first->seed_index) + " " + r.first->reg + ": " + r.first->detail;
      t.add_row({oc.domain, std::to_string(oc.m), std::to_string(oc.horizon), std::to_string(r.checked), yes(r.ok),
                 detail});
      if (!r.ok) status = 1;
      emit(t.csv(manifest_for(o_check, out)), out);
    };
  });

  // ---- domain ----
  auto* domain_cmd = app.add_subcommand("domain", "classical rollouts and exact values")->require_subcommand(1);
  DomainArgs dv;
  std::uint64_t dv_shots = 10000, dv_seed = 0;
  std::optional<std::uint64_t> dv_arm;
  bool dv_no_exact = false;
  auto* d_value = domain_cmd->add_subcommand("value", "DP-exact and Monte Carlo payoff probability");
  dv.add(d_value);
  d_value->add_option("--arm", dv_arm, "fix the round-1 selector 0 to this rank");
  d_value->add_option("--shots", dv_shots)->capture_default_str();
  d_value->add_option("--seed", dv_seed)->required();
  d_value->add_flag("--no-exact", dv_no_exact, "skip the exact DP");
  add_out(d_value);
  d_value->callback([&] {
    action = [&] {
      const auto spec = dv.spec();
      const Config init = dv.init(*spec);
      report::Table t({{"domain", P::input}, {"m", P::input}, {"H", P::input}, {"exact", P::exact},
                       {"mc", P::monte_carlo}, {"mc_lo95", P::monte_carlo}, {"mc_hi95", P::monte_carlo},
                       {"shots", P::input}});
      const double ex = dv_no_exact ? std::nan("") : domains::exact_value(*spec, init, dv_arm);
      domains::McValue mc;
      if (dv_shots) mc = domains::mc_value(*spec, init, dv_shots, dv_seed, dv_arm);
      t.add_row({dv.domain, std::to_string(dv.m), std::to_string(dv.horizon), num(ex), num(mc.p), num(mc.ci_lo),
                 num(mc.ci_hi), std::to_string(dv_shots)});
      emit(t.csv(manifest_for(d_value, out)), out);
    };
  });

  DomainArgs da;
  unsigned da_k = 4;
  auto* d_arms = domain_cmd->add_subcommand("arms", "exact arm means for the first k valid cells");
  da.add(d_arms);
  d_arms->add_option("--k", da_k)->check(CLI::PositiveNumber)->capture_default_str();
  add_out(d_arms);
  d_arms->callback([&] {
    action = [&] {
      const auto spec = da.spec();
      const auto mu = domains::arm_means(*spec, da.init(*spec), da_k);
      report::Table t({{"arm", P::input}, {"mean", P::exact}});
      for (unsigned j = 0; j < mu.size(); ++j) t.add_row({std::to_string(j), num(mu[j])});
      emit(t.csv(manifest_for(d_arms, out)), out);
    };
  });

  unsigned rw_m = 3, rw_h = 2, rw_t = 2;
  auto* d_rho = domain_cmd->add_subcommand("rho-sweep", "exact epi value for rho = 0..8");
  d_rho->add_option("--m", rw_m)->capture_default_str();
  d_rho->add_option("--H", rw_h)->capture_default_str();
  d_rho->add_option("--T", rw_t)->capture_default_str();
  add_out(d_rho);
  d_rho->callback([&] {
    action = [&] {
      report::Table t({{"rho", P::input}, {"exact", P::exact}});
      for (auto [rho, v] : experiments::rho_sweep(rw_m, rw_h, rw_t)) t.add_row({std::to_string(rho), num(v)});
      emit(t.csv(manifest_for(d_rho, out)), out);
    };
  });

  // ---- bestarm ----
  auto* bestarm_cmd = app.add_subcommand("bestarm", "best-arm identification accounting")->require_subcommand(1);
  std::vector<unsigned> ba_k{4, 8, 16, 32, 64};
  std::vector<double> ba_eps{0.2, 0.1, 0.05, 0.025};
  unsigned ba_trials = 200;
  std::uint64_t ba_seed = 0;
  bestarm::QuantumConstants qc;
  auto* b_sep = bestarm_cmd->add_subcommand("separate", "classical vs quantum query counts on the hard family");
  b_sep->add_option("--k", ba_k)->delimiter(',')->capture_default_str();
  b_sep->add_option("--eps", ba_eps)->delimiter(',')->capture_default_str();
  b_sep->add_option("--trials", ba_trials)->check(CLI::PositiveNumber)->capture_default_str();
  b_sep->add_option("--seed", ba_seed)->required();
  b_sep->add_option("--c-ae", qc.c_ae, "oracle calls per AE run times eps")->capture_default_str();
  b_sep->add_option("--c-dh", qc.c_dh, "max-finding budget per sqrt(k)")->capture_default_str();
  add_out(b_sep);
  b_sep->callback([&] {
    action = [&] {
      for (double e : ba_eps)
        if (!(e > 0 && e < 0.5)) throw UsageError("--eps values must lie in (0, 0.5)");
      auto rep = bestarm::separation_report(ba_k, ba_eps, ba_trials, ba_seed, qc);
      report::Table t({{"k", P::input}, {"eps", P::input}, {"valid", P::derived}, {"lower_bound", P::formula},
                       {"classical_mean", P::monte_carlo}, {"classical_sd", P::monte_carlo},
                       {"classical_success", P::monte_carlo}, {"quantum_mean", P::monte_carlo},
                       {"quantum_sd", P::monte_carlo}, {"quantum_success", P::monte_carlo}});
      for (const auto& r : rep.rows)
        t.add_row({std::to_string(r.k), num(r.eps, 4), yes(r.valid), num(r.lower_bound, 4), num(r.classical_mean, 2),
                   num(r.classical_sd, 2), num(r.classical_success, 4), num(r.quantum_mean, 2),
                   num(r.quantum_sd, 2), num(r.quantum_success, 4)});
      auto m = manifest_for(b_sep, out);
      m.params.emplace_back("fit rows", std::to_string(rep.slopes.rows_used));
      m.params.emplace_back("fit classical slope k", num(rep.slopes.classical_k, 4));
      m.params.emplace_back("fit classical slope 1/eps", num(rep.slopes.classical_inv_eps, 4));
      m.params.emplace_back("fit quantum slope k", num(rep.slopes.quantum_k, 4));
      m.params.emplace_back("fit quantum slope 1/eps", num(rep.slopes.quantum_inv_eps, 4));
      emit(t.csv(m), out);
    };
  });

  unsigned lb_k = 10;
  double lb_eps = 0.1;
  auto* b_lb = bestarm_cmd->add_subcommand("lower-bound", "classical expected-rollout lower bound");
  b_lb->add_option("--k", lb_k)->capture_default_str();
  b_lb->add_option("--eps", lb_eps)->capture_default_str();
  add_out(b_lb);
  b_lb->callback([&] {
    action = [&] {
      report::Table t({{"k", P::input}, {"eps", P::input}, {"lower_bound", P::formula}});
      t.add_row({std::to_string(lb_k), num(lb_eps, 6), num(bestarm::classical_lower_bound(lb_k, lb_eps), 6)});
      emit(t.csv(manifest_for(b_lb, out)), out);
    };
  });

  unsigned tr_k = 10, tr_trials = 200;
  double tr_eps = 0.05;
  std::uint64_t tr_seed = 0;
  auto* b_tr = bestarm_cmd->add_subcommand("transport", "per-arm pulls against the transportation ratio");
  b_tr->add_option("--k", tr_k)->capture_default_str();
  b_tr->add_option("--eps", tr_eps)->capture_default_str();
  b_tr->add_option("--trials", tr_trials)->capture_default_str();
  b_tr->add_option("--seed", tr_seed)->required();
  add_out(b_tr);
  b_tr->callback([&] {
    action = [&] {
      auto r = bestarm::transport_check(tr_k, tr_eps, tr_trials, tr_seed);
      report::Table t({{"arm", P::input}, {"mean_pulls", P::monte_carlo}, {"se", P::monte_carlo},
                       {"ratio", P::formula}, {"ok", P::derived}});
      for (const auto& a : r.arms)
        t.add_row({std::to_string(a.arm), num(a.mean_pulls, 2), num(a.se, 2), num(r.ratio, 4), yes(a.ok)});
      if (!r.ok) status = 1;
      emit(t.csv(manifest_for(b_tr, out)), out);
    };
  });

  // ---- bounds ----
  auto* bounds_cmd = app.add_subcommand("bounds", "influence decay and lifting checks")->require_subcommand(1);
  bounds::InfluenceModel dm{4, 0.125, 5};
  unsigned d_max = 10;
  auto* bd_decay = bounds_cmd->add_subcommand("decay", "per-round and cumulative decay bounds");
  bd_decay->add_option("--kappa", dm.kappa)->capture_default_str();
  bd_decay->add_option("--p", dm.p)->capture_default_str();
  bd_decay->add_option("--H", dm.horizon)->capture_default_str();
  bd_decay->add_option("--d-max", d_max)->capture_default_str();
  add_out(bd_decay);
  bd_decay->callback([&] {
    action = [&] {
      report::Table t({{"d", P::input}, {"per_round", P::formula}, {"cumulative", P::formula}});
      for (unsigned d = 1; d <= d_max; ++d)
        t.add_row({std::to_string(d), num(bounds::decay_per_round(dm, d), 10), num(bounds::decay_cumulative(dm, d), 10)});
      emit(t.csv(manifest_for(bd_decay, out)), out);
    };
  });

  unsigned pp_m = 10, pp_h = 2;
  auto* bd_per = bounds_cmd->add_subcommand("peripheral", "centre-anchored peripheral set");
  bd_per->add_option("--m", pp_m)->check(CLI::PositiveNumber)->capture_default_str();
  bd_per->add_option("--H", pp_h)->capture_default_str();
  add_out(bd_per);
  bd_per->callback([&] {
    action = [&] {
      auto ps = bounds::peripheral_set(pp_m, pp_h);
      report::Table t({{"m", P::input}, {"H", P::input}, {"radius", P::derived}, {"size", P::measured},
                       {"inequality", P::formula}, {"nonempty", P::measured}});
      t.add_row({std::to_string(pp_m), std::to_string(pp_h), std::to_string(ps.radius), std::to_string(ps.cells.size()),
                 yes(ps.inequality), yes(ps.nonempty())});
      if (ps.inequality && !ps.nonempty()) status = 1;
      emit(t.csv(manifest_for(bd_per, out)), out);
    };
  });

  DomainArgs bi;
  unsigned bi_site = 0, bi_alt = 1, bi_action = 1;
  std::uint64_t bi_trials = 100000, bi_seed = 0;
  bounds::InfluenceModel bim{4, 0.125, 0};
  auto* bd_inf = bounds_cmd->add_subcommand("influence", "coupled single-site influence at the action cell");
  bi.add(bd_inf);
  bd_inf->add_option("--site", bi_site)->capture_default_str();
  bd_inf->add_option("--alt", bi_alt, "alternative cell value 0..2")->check(CLI::Range(0u, 2u))->capture_default_str();
  bd_inf->add_option("--action", bi_action)->capture_default_str();
  bd_inf->add_option("--kappa", bim.kappa)->capture_default_str();
  bd_inf->add_option("--p", bim.p)->capture_default_str();
  bd_inf->add_option("--trials", bi_trials)->check(CLI::PositiveNumber)->capture_default_str();
  bd_inf->add_option("--seed", bi_seed)->required();
  add_out(bd_inf);
  bd_inf->callback([&] {
    action = [&] {
      const auto spec = bi.spec();
      auto model = bim;
      model.horizon = bi.horizon;
      auto r = bounds::empirical_influence(*spec, bi.init(*spec), bi_site, static_cast<std::uint8_t>(bi_alt), bi_action,
                                           model, bi_trials, bi_seed);
      report::Table t({{"distance", P::derived}, {"reach", P::monte_carlo}, {"reach_se", P::monte_carlo},
                       {"bound", P::formula}, {"payoff_delta", P::monte_carlo}, {"payoff_se", P::monte_carlo},
                       {"ok", P::derived}});
      t.add_row({std::to_string(r.distance), num(r.reach), num(r.reach_se), num(r.bound), num(r.payoff_delta),
                 num(r.payoff_se), yes(r.ok)});
      if (!r.ok) status = 1;
      emit(t.csv(manifest_for(bd_inf, out)), out);
    };
  });

  DomainArgs bl;
  std::vector<unsigned> bl_arms{7, 0};
  unsigned bl_radius = 2;
  std::optional<double> bl_eps;
  std::uint64_t bl_samples = 50, bl_seed = 0;
  auto* bd_lift = bounds_cmd->add_subcommand("lifting", "check a modular lifting witness with positional arms");
  bl.add(bd_lift);
  bd_lift->add_option("--arms", bl_arms, "arm cells; the first is the claimed best")->delimiter(',')->capture_default_str();
  bd_lift->add_option("--radius", bl_radius, "Q = cells farther than this from every arm")->capture_default_str();
  bd_lift->add_option("--eps", bl_eps, "gap parameter (default: a third of the base gap)");
  bd_lift->add_option("--samples", bl_samples)->capture_default_str();
  bd_lift->add_option("--seed", bl_seed)->required();
  add_out(bd_lift);
  bd_lift->callback([&] {
    action = [&] {
      const auto spec = bl.spec();
      if (bl_arms.size() < 2) throw UsageError("--arms needs at least two cells");
      bounds::LiftingWitness w;
      w.base = bl.init(*spec);
      w.delta.assign(spec->cells(), 0.0);
      for (unsigned a : bl_arms) w.supports.push_back({a});
      for (unsigned j = 0; j < spec->cells(); ++j) {
        bool far = true;
        for (unsigned a : bl_arms) far = far && bounds::manhattan(spec->side(), j, a) > bl_radius;
        if (far) w.peripheral.push_back(j);
      }
      auto values = bounds::positional_arm_oracle(*spec, bl_arms);
      if (bl_eps) {
        w.eps = *bl_eps;
      } else {
        const auto v = values(w.base);
        double gap = INFINITY;
        for (std::size_t j = 1; j < v.size(); ++j) gap = std::min(gap, v[0] - v[j]);
        w.eps = std::max(0.0, gap / 3);
      }
      auto r = bounds::check_lifting(w, values, bl_samples, bl_seed);
      report::Table t({{"q_size", P::derived}, {"family_size", P::derived}, {"eps", P::input},
                       {"members", P::measured}, {"exhaustive", P::derived}, {"structural_ok", P::derived},
                       {"base_gap_ok", P::exact}, {"eps_optimal", P::exact}, {"modular_equal", P::exact},
                       {"max_value_shift", P::exact}, {"detail", P::derived}});
      t.add_row({std::to_string(w.peripheral.size()), r.family_size, num(w.eps), std::to_string(r.members_checked),
                 yes(r.exhaustive), yes(r.structural_ok), yes(r.base_gap_ok), yes(r.eps_optimal),
                 yes(r.modular_equal), num(r.max_value_shift), r.structural_detail + r.value_detail});
      if (!r.structural_ok || !r.base_gap_ok || !r.eps_optimal) status = 1;
      emit(t.csv(manifest_for(bd_lift, out)), out);
    };
  });

  // ---- tables ----
  auto* tables_cmd = app.add_subcommand("tables", "reproduce the correctness and scaling tables")->require_subcommand(1);
  std::uint64_t tc_shots = 10000, tc_seed = 0, tc_branches = 1000;
  auto* t_corr = tables_cmd->add_subcommand("correctness", "qubits, depth, gates, MC and exact payoff");
  t_corr->add_option("--shots", tc_shots)->check(CLI::PositiveNumber)->capture_default_str();
  t_corr->add_option("--branches", tc_branches)->capture_default_str();
  t_corr->add_option("--seed", tc_seed)->required();
  add_out(t_corr);
  t_corr->callback([&] {
    action = [&] {
      report::Table t({{"domain", P::input}, {"instance", P::input}, {"qubits", P::measured},
                       {"qubits", P::formula}, {"depth", P::measured}, {"gates", P::measured},
                       {"gates", P::formula}, {"mc_payoff", P::monte_carlo}, {"mc_lo95", P::monte_carlo},
                       {"mc_hi95", P::monte_carlo}, {"exact_payoff", P::exact}, {"branches_ok", P::measured},
                       {"qubits", P::published}, {"depth", P::published}, {"gates", P::published},
                       {"mc_payoff", P::published}, {"exact_payoff", P::published}});
      for (const auto& [inst, pub] : experiments::correctness_instances()) {
        auto r = experiments::correctness_row(inst, tc_shots, tc_seed, tc_branches);
        t.add_row({inst.domain, inst.label(), std::to_string(r.qubits), std::to_string(r.qubits_formula),
                   std::to_string(r.depth), std::to_string(r.gates), std::to_string(r.gates_formula), num(r.mc, 4),
                   num(r.mc_lo, 4), num(r.mc_hi, 4), num(r.exact, 6), yes(r.branchwise_ok),
                   std::to_string(pub.qubits), std::to_string(pub.depth), std::to_string(pub.gates), num(pub.mc, 3),
                   num(pub.exact, 3)});
        if (!r.branchwise_ok || r.qubits != r.qubits_formula || r.gates != r.gates_formula) status = 1;
      }
      emit(t.csv(manifest_for(t_corr, out)), out);
    };
  });

  unsigned ts_build_max = 10;
  auto* t_scal = tables_cmd->add_subcommand("scaling", "formula and measured counts over the scaling grid");
  t_scal->add_option("--build-max-m", ts_build_max, "compose full circuits up to this side")->capture_default_str();
  add_out(t_scal);
  t_scal->callback([&] {
    action = [&] {
      report::Table t({{"domain", P::input}, {"m", P::input}, {"H", P::input}, {"N", P::derived},
                       {"qubits", P::formula}, {"qubits", P::measured}, {"config", P::formula},
                       {"selectors", P::formula}, {"dice", P::formula}, {"ancilla", P::formula},
                       {"gates", P::formula}, {"gates", P::measured}, {"qubits", P::published},
                       {"qubit_rel_diff", P::derived}, {"gates", P::published}});
      for (const auto& pt : experiments::scaling_grid())
        for (const char* d : {"sway", "epi"}) {
          auto r = experiments::scaling_row(d, pt, pt.m <= ts_build_max);
          auto opt = [](const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string(); };
          t.add_row({r.domain, std::to_string(r.m), std::to_string(r.horizon), std::to_string(r.n),
                     std::to_string(r.qubits_formula), opt(r.qubits_measured), std::to_string(r.q_config),
                     std::to_string(r.q_selectors), std::to_string(r.q_dice), std::to_string(r.q_ancilla),
                     std::to_string(r.gates_formula), opt(r.gates_measured), std::to_string(r.published_qubits),
                     num(r.qubit_rel_diff(), 4), std::to_string(r.published_gates)});
          if ((r.qubits_measured && *r.qubits_measured != r.qubits_formula) ||
              (r.gates_measured && *r.gates_measured != r.gates_formula))
            status = 1;
        }
      emit(t.csv(manifest_for(t_scal, out)), out);
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    if (action) action();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return 1;
  }
  return status;
}
