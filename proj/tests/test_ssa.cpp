#include <gtest/gtest.h>

#include <cmath>

#include "bond/ode.hpp"
#include "bond/ssa.hpp"
#include "support.hpp"

namespace bond {
namespace {

ReactionSystem decay_system(double k) {
  Model m = parse_model("param k = " + format_number(k) + "; species A = p.0; affinity { p at MA(k); } mixture { 1 A }");
  return compile(m);
}

TEST(Ssa, LinearPropensityIsIndependentOfLevelSize) {
  ReactionSystem rs = decay_system(0.3);
  for (double h : {1.0, 0.01, 1e4}) {
    DiscreteSystem sys = discretize(rs, h);
    std::vector<double> scratch;
    EXPECT_NEAR(sys.propensity(0, {7}, scratch), 0.3 * 7, 1e-12);
  }
}

TEST(Ssa, DimerPropensityScalesWithLevelSize) {
  ReactionSystem rs = compile(testing::load_model("dimer.bond"));
  const double h = 0.01;
  DiscreteSystem sys = discretize(rs, h);
  std::size_t bind = 0;
  for (std::size_t e = 0; e < sys.events.size(); ++e) {
    if (rs.reactions[sys.events[e].reaction].reactants.size() == 2) bind = e;
  }
  std::vector<std::int64_t> levels(sys.species(), 0);
  std::size_t A = rs.reactions[sys.events[bind].reaction].reactants[0];
  levels[A] = 50;
  std::vector<double> scratch;
  EXPECT_NEAR(sys.propensity(bind, levels, scratch), 0.5 * 2.0 * h * 50 * 50, 1e-9);
}

TEST(Ssa, InitialLevelsAreRounded) {
  DiscreteSystem sys = discretize(compile(testing::load_model("mm.bond")), 0.1);
  std::vector<std::int64_t> sorted = sys.initial;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::int64_t>{0, 3, 10}));  // 0.25 / 0.1 rounds to 3
}

TEST(Ssa, RejectsNonPositiveLevelSize) {
  ReactionSystem rs = decay_system(1.0);
  EXPECT_THROW(discretize(rs, 0.0), BondError);
  EXPECT_THROW(discretize(rs, -1.0), BondError);
}

TEST(Ssa, SingleMoleculeDecayIsAbsorbed) {
  DiscreteSystem sys = discretize(decay_system(1.0), 1.0);
  SsaOptions o;
  o.t_end = 1000.0;
  o.seed = 1;
  o.record_events = true;
  SsaRun run = gillespie(sys, {1}, o);
  EXPECT_EQ(run.event_count, 1u);
  EXPECT_TRUE(run.absorbed);
  EXPECT_EQ(run.levels.back()[0], 0);
  EXPECT_EQ(run.levels.size(), run.times.size());
}

TEST(Ssa, DecayMeanMatchesAnalyticMean) {
  DiscreteSystem sys = discretize(decay_system(1.0), 1.0);
  SsaOptions o;
  o.t_end = 1.0;
  o.sample_dt = 0.5;
  o.seed = 42;
  auto runs = run_ensemble(sys, {1000}, o, 200);
  EnsembleStats st = aggregate(sys, runs);
  ASSERT_EQ(st.times.size(), 3u);
  double mean = st.mean.back()[0];
  double se = st.stddev.back()[0] / std::sqrt(200.0);
  EXPECT_LE(std::abs(mean - 1000 * std::exp(-1.0)), 3 * se);
}

TEST(Ssa, RunsAreReproducible) {
  DiscreteSystem sys = discretize(compile(testing::load_model("enzyme_ma.bond")), 0.01);
  SsaOptions o;
  o.t_end = 2.0;
  o.seed = 99;
  o.record_events = true;
  SsaRun a = gillespie(sys, sys.initial, o, 3);
  SsaRun b = gillespie(sys, sys.initial, o, 3);
  EXPECT_GT(a.event_count, 0u);
  EXPECT_EQ(a.event_times, b.event_times);
  EXPECT_EQ(a.event_indices, b.event_indices);
  EXPECT_EQ(a.levels, b.levels);
  SsaRun c = gillespie(sys, sys.initial, o, 4);
  EXPECT_NE(a.event_times, c.event_times);
}

TEST(Ssa, EnsembleDoesNotDependOnThreadCount) {
  DiscreteSystem sys = discretize(compile(testing::load_model("enzyme_ma.bond")), 0.01);
  SsaOptions o;
  o.t_end = 1.0;
  o.seed = 5;
  auto one = run_ensemble(sys, sys.initial, o, 12, 1);
  auto many = run_ensemble(sys, sys.initial, o, 12, 4);
  ASSERT_EQ(one.size(), many.size());
  for (std::size_t r = 0; r < one.size(); ++r) {
    EXPECT_EQ(one[r].run, r);
    EXPECT_EQ(one[r].levels, many[r].levels);
  }
  EXPECT_EQ(runs_csv(sys, one), runs_csv(sys, many));
}

TEST(Ssa, EventTimesIncreaseAndStatesStayNonnegative) {
  DiscreteSystem sys = discretize(compile(testing::load_model("inhibitor.bond")), 0.01);
  SsaOptions o;
  o.t_end = 5.0;
  o.seed = 8;
  o.record_events = true;
  SsaRun run = gillespie(sys, sys.initial, o);
  for (std::size_t i = 1; i < run.event_times.size(); ++i) EXPECT_GT(run.event_times[i], run.event_times[i - 1]);
  for (const auto& row : run.levels) {
    for (auto v : row) EXPECT_GE(v, 0);
  }
}

TEST(Ssa, EnzymeConservationIsExact) {
  ReactionSystem rs = compile(testing::load_model("enzyme_ma.bond"));
  OdeSystem odes = build_odes(rs);
  auto laws = conservation_laws(odes);
  ASSERT_EQ(laws.size(), 1u);
  DiscreteSystem sys = discretize(rs, 0.01);
  SsaOptions o;
  o.t_end = 5.0;
  o.sample_dt = 0.01;
  o.seed = 17;
  for (const auto& run : run_ensemble(sys, sys.initial, o, 10)) {
    auto total = [&](const std::vector<std::int64_t>& x) {
      std::int64_t s = 0;
      for (std::size_t i = 0; i < x.size(); ++i) s += laws[0][i] * x[i];
      return s;
    };
    for (const auto& row : run.levels) EXPECT_EQ(total(row), total(run.levels.front()));
  }
}

TEST(Ssa, NegativePropensityIsClampedWithOneWarning) {
  Model m = parse_model(
      "law Shrink(; x) = 1 - x;\n"
      "species A = a.(A | A);\n"
      "affinity { a at Shrink(); }\n"
      "mixture { 0.5 A }\n");
  DiscreteSystem sys = discretize(compile(m), 0.4);
  SsaOptions o;
  o.t_end = 100.0;
  o.seed = 2;
  SsaRun run = gillespie(sys, sys.initial, o);
  EXPECT_EQ(run.warnings.size(), 1u);
  EXPECT_TRUE(run.absorbed);
  EXPECT_EQ(run.levels.back()[0], 3);  // growth stops once 1 - x < 0
}

TEST(Ssa, CsvLayouts) {
  DiscreteSystem sys = discretize(decay_system(1.0), 0.5);
  SsaOptions o;
  o.t_end = 1.0;
  o.sample_dt = 0.5;
  auto runs = run_ensemble(sys, {4}, o, 2);
  std::string csv = runs_csv(sys, runs);
  EXPECT_EQ(csv.rfind("run,t,", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 * 3);
  std::string stats = stats_csv(sys, aggregate(sys, runs));
  EXPECT_NE(stats.find("mean("), std::string::npos);
  EXPECT_NE(stats.find("std("), std::string::npos);
}

TEST(Ssa, StreamSeedsDiffer) {
  EXPECT_NE(run_seed(1, 0), run_seed(1, 1));
  EXPECT_NE(run_seed(1, 0), run_seed(2, 0));
  EXPECT_EQ(run_seed(7, 3), run_seed(7, 3));
}

}  // namespace
}  // namespace bond
