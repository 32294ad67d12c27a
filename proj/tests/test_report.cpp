#include <gtest/gtest.h>

#include <cmath>

#include "ro/experiments.hpp"
#include "ro/report.hpp"

using namespace ro;
using namespace ro::report;

TEST(Report, ManifestHeaderAndProvenanceColumns) {
  Manifest m{"bounds decay", {{"--kappa", "4"}, {"--p", "0.125"}}, 42, {"out.csv"}};
  Table t({{"d", Provenance::input}, {"bound", Provenance::formula}, {"mc", Provenance::monte_carlo}});
  t.add_row({"1", num(0.5), num(0.25, 2)});
  const std::string want =
      "# tool: rollout 1.0.0\n"
      "# subcommand: bounds decay\n"
      "# param --kappa: 4\n"
      "# param --p: 0.125\n"
      "# seed: 42\n"
      "# output: out.csv\n"
      "d[input],bound[formula],mc[mc]\n"
      "1,0.500000,0.25\n";
  EXPECT_EQ(t.csv(m), want);
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
}

TEST(Report, NumberFormattingIsStable) {
  EXPECT_EQ(num(1.0 / 3, 4), "0.3333");
  EXPECT_EQ(num(-0.0, 3), "0.000");
  EXPECT_EQ(num(-1e-9, 3), "0.000");
  EXPECT_EQ(num(-0.5, 1), "-0.5");
  EXPECT_EQ(num(std::nan(""), 3), "nan");
  EXPECT_EQ(num(INFINITY), "inf");
}

TEST(Report, CsvEscaping) {
  EXPECT_EQ(csv_escape("plain"), "plain");
  EXPECT_EQ(csv_escape("a,b"), "\"a,b\"");
  EXPECT_EQ(csv_escape("say \"hi\""), "\"say \"\"hi\"\"\"");
}

TEST(Experiments, RankSelectEquivalenceSmallN) {
  for (unsigned n = 1; n <= 5; ++n) {
    auto r = experiments::rank_select_equivalence(n);
    EXPECT_TRUE(r.ok()) << r.detail;
    EXPECT_EQ(r.pairs, (1u << n) << rank_select::width_for(n));
  }
}

TEST(Experiments, CrossoverIsTheStartOfTheFinalWinningRun) {
  std::vector<experiments::RsScalingRow> rows(4);
  const std::size_t scan[] = {10, 20, 40, 80}, blocked[] = {5, 30, 35, 70};
  for (unsigned i = 0; i < 4; ++i) {
    rows[i].n = 4u << i;
    rows[i].scan_gates = scan[i];
    rows[i].blocked_gates = blocked[i];
  }
  EXPECT_EQ(experiments::blocked_crossover(rows), 16u);
  rows[3].blocked_gates = 90;
  EXPECT_FALSE(experiments::blocked_crossover(rows).has_value());
}

TEST(Experiments, StructureChecksOnSmallCircuits) {
  for (auto v : {rank_select::Variant::scan, rank_select::Variant::blocked}) {
    auto s = experiments::lower_bound_structure(v, 8);
    EXPECT_TRUE(s.ok());
    EXPECT_EQ(s.cuts, 7u);
    EXPECT_GE(s.min_crossing, 1u);
  }
}

TEST(Experiments, ScalingRowFormulaMatchesBuild) {
  auto r = experiments::scaling_row("epi", {5, 5}, true);
  ASSERT_TRUE(r.qubits_measured && r.gates_measured);
  EXPECT_EQ(*r.qubits_measured, r.qubits_formula);
  EXPECT_EQ(*r.gates_measured, r.gates_formula);
  EXPECT_EQ(r.published_qubits, 767u);
  EXPECT_EQ(r.q_config + r.q_selectors + r.q_dice + r.q_ancilla + 1, r.qubits_formula);
}

TEST(Experiments, RhoSweepIsIncreasing) {
  auto sweep = experiments::rho_sweep(3, 2, 2);
  ASSERT_EQ(sweep.size(), 9u);
  for (std::size_t i = 1; i < sweep.size(); ++i) EXPECT_GT(sweep[i].second, sweep[i - 1].second);
  EXPECT_NEAR(sweep[2].second, 0.869479, 1e-6);
}
