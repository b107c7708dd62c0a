#include <gtest/gtest.h>

#include "bond/json.hpp"
#include "support.hpp"

namespace bond {
namespace {

Expr species_var(const ReactionSystem& rs, const std::string& label) {
  for (std::size_t i = 0; i < rs.labels.size(); ++i) {
    if (rs.labels[i] == label) return Expr::var(VarKind::Species, i, label);
  }
  ADD_FAILURE() << "no species " << label;
  return Expr();
}

Expr param(const ReactionSystem& rs, const std::string& name) {
  for (std::size_t i = 0; i < rs.param_names.size(); ++i) {
    if (rs.param_names[i] == name) return Expr::var(VarKind::Param, i, name);
  }
  ADD_FAILURE() << "no param " << name;
  return Expr();
}

const Reaction* with_reactants(const ReactionSystem& rs, std::vector<std::size_t> reactants) {
  std::sort(reactants.begin(), reactants.end());
  for (const auto& r : rs.reactions) {
    if (r.reactants == reactants) return &r;
  }
  return nullptr;
}

void expect_same(const Expr& got, const Expr& want) {
  EXPECT_EQ(structural_key(simplify(got)), structural_key(simplify(want)));
}

TEST(Reactions, DimerRateHasHalfFactor) {
  ReactionSystem rs = compile(testing::load_model("dimer.bond"));
  ASSERT_EQ(rs.index.size(), 2u);
  Expr a = species_var(rs, "A");
  const Reaction* bind = with_reactants(rs, {0, 0});
  ASSERT_NE(bind, nullptr);
  expect_same(bind->rate, Expr::constant(0.5) * param(rs, "k2") * a * a);
  ASSERT_EQ(bind->products.size(), 1u);
  const Reaction* unbind = with_reactants(rs, {1});
  ASSERT_NE(unbind, nullptr);
  EXPECT_EQ(unbind->products, (std::vector<std::size_t>{0, 0}));
}

TEST(Reactions, TrimerRateHasSixthFactor) {
  ReactionSystem rs = compile(testing::load_model("trimer.bond"));
  Expr a = species_var(rs, "A");
  const Reaction* bind = with_reactants(rs, {0, 0, 0});
  ASSERT_NE(bind, nullptr);
  expect_same(bind->rate, Expr::constant(1.0 / 6.0) * param(rs, "k3") * a * a * a);
}

TEST(Reactions, BivalentMonomerHasNoSymmetryFactor) {
  ReactionSystem rs = compile(testing::load_model("bivalent.bond"));
  Expr b = species_var(rs, "B");
  const Reaction* bind = with_reactants(rs, {0, 0});
  ASSERT_NE(bind, nullptr);
  expect_same(bind->rate, param(rs, "k") * b * b);
  // a||b binding: both orders give the same complex.
  EXPECT_EQ(rs.index.size(), 2u);
}

TEST(Reactions, MichaelisMentenKeepsEnzyme) {
  ReactionSystem rs = compile(testing::load_model("mm.bond"));
  ASSERT_EQ(rs.index.size(), 3u);
  Expr s = species_var(rs, "S");
  Expr e = species_var(rs, "E");
  const Reaction* conv = with_reactants(rs, {0, 1});
  ASSERT_NE(conv, nullptr);
  expect_same(conv->rate, Expr::div(param(rs, "Vmax") * s * e, param(rs, "k") + e));
  EXPECT_EQ(conv->products.size(), 2u);
}

TEST(Reactions, KuznetsovHasFourPrimes) {
  ReactionSystem rs = compile(testing::load_model("kuznetsov.bond"));
  EXPECT_EQ(rs.index.size(), 4u);
  std::set<std::string> labels(rs.labels.begin(), rs.labels.end());
  EXPECT_EQ(labels, (std::set<std::string>{"TC", "EC", "IS", "ECTC"}));
  EXPECT_DOUBLE_EQ(rs.initial[*rs.index.find(normalize(SpeciesTerm::invoke("TC"), testing::load_model("kuznetsov.bond").species).key)], 1e7);
}

TEST(Reactions, MassActionRatesAreMonomials) {
  for (const char* name : {"dimer.bond", "trimer.bond", "bivalent.bond", "enzyme_ma.bond", "inhibitor.bond"}) {
    SCOPED_TRACE(name);
    ReactionSystem rs = compile(testing::load_model(name));
    std::function<bool(const Expr&)> has_div = [&](const Expr& e) {
      if (e.kind() == Expr::Kind::Div) return true;
      for (const auto& c : e.children()) {
        if (has_div(c)) return true;
      }
      return false;
    };
    for (const auto& r : rs.reactions) EXPECT_FALSE(has_div(r.rate));
  }
}

TEST(Reactions, UnboundedGrowthHitsTheCap) {
  Model m = parse_model(
      "species M = a(l).Ma(l) + b(l).Mb(l);\n"
      "species Ma(l) = x@l.0 + b(m).Mab(l, m);\n"
      "species Mb(l) = x@l.0 + a(m).Mab(m, l);\n"
      "species Mab(l, m) = x@l.0 + x@m.0;\n"
      "affinity { a || b at MA(1); }\n"
      "mixture { 1 M }\n");
  try {
    compile(m, 16);
    FAIL() << "expected an error";
  } catch (const BondError& e) {
    EXPECT_EQ(e.code(), ErrorCode::Unbounded);
  }
}

TEST(Reactions, PatternWithoutPartnersWarns) {
  Model m = parse_model("species A = a.0; species Z = z.0; affinity { a || b at MA(1); a at MA(1); } mixture { 1 A }");
  ReactionSystem rs = compile(m);
  EXPECT_EQ(rs.reactions.size(), 1u);
  EXPECT_FALSE(rs.warnings.empty());
}

TEST(Reactions, SharedPatternsAreSummed) {
  Model m = parse_model("species A = a.0; affinity { a at MA(1); a at MA(2); } mixture { 1 A }");
  ReactionSystem rs = compile(m);
  ASSERT_EQ(rs.reactions.size(), 1u);
  std::vector<double> x{1.0};
  EvalEnv env;
  env.params = rs.param_values;
  env.species = x;
  EXPECT_DOUBLE_EQ(evaluate(rs.reactions[0].rate, env), 3.0);
}

TEST(Reactions, ReactionsWithoutNetChangeAreKept) {
  Model m = parse_model("species A = a.A; affinity { a at MA(1); } mixture { 1 A }");
  ReactionSystem rs = compile(m);
  ASSERT_EQ(rs.reactions.size(), 1u);
  EXPECT_TRUE(rs.reactions[0].net().empty());
}

TEST(Reactions, ReachablePrimesIncludeIntermediates) {
  ReactionSystem rs = compile(testing::load_model("enzyme_ma.bond"));
  EXPECT_EQ(rs.index.size(), 4u);  // S, E, complex, P
  EXPECT_EQ(rs.reactions.size(), 4u);
}

TEST(Reactions, FluxProvenanceCoversEveryReaction) {
  ReactionSystem rs = compile(testing::load_model("kuznetsov.bond"));
  for (std::size_t r = 0; r < rs.reactions.size(); ++r) {
    ASSERT_FALSE(rs.reactions[r].fluxes.empty());
    for (auto f : rs.reactions[r].fluxes) EXPECT_EQ(rs.fluxes[f].reaction, r);
  }
}

TEST(Reactions, SlotWiseExtractionMatchesBruteForce) {
  std::mt19937_64 rng(7);
  for (const auto& name : testing::corpus()) {
    SCOPED_TRACE(name);
    Model m = testing::load_model(name);
    ReactionSystem rs = compile(m);
    for (int trial = 0; trial < 5; ++trial) {
      std::vector<double> x = testing::random_point(rs.index.size(), rng);
      auto oracle = testing::brute_force_rates(m, rs.index, x);
      EvalEnv env;
      env.params = rs.param_values;
      env.species = x;
      std::size_t compared = 0;
      for (const auto& r : rs.reactions) {
        auto it = oracle.find({r.reactants, r.products});
        ASSERT_NE(it, oracle.end());
        EXPECT_LE(testing::rel_diff(evaluate(r.rate, env), it->second), 1e-9);
        ++compared;
      }
      EXPECT_EQ(compared, oracle.size());
    }
  }
}

TEST(Reactions, CrnJsonListsPrimesAndReactions) {
  ReactionSystem rs = compile(testing::load_model("dimer.bond"));
  std::string j = crn_json(rs);
  EXPECT_NE(j.find("\"primes\""), std::string::npos);
  EXPECT_NE(j.find("\"reactions\""), std::string::npos);
  EXPECT_NE(j.find("\"kind\": \"mul\""), std::string::npos);
}

}  // namespace
}  // namespace bond
