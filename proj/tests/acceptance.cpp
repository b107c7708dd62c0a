// Acceptance gate: one line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

#include "bond/ode.hpp"
#include "bond/ssa.hpp"
#include "cli.hpp"
#include "support.hpp"

namespace {

using namespace bond;
using bond::testing::load_model;
using bond::testing::rel_diff;

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) {
      ok = false;
      detail = what;
    }
  }
};

std::size_t label_index(const std::vector<std::string>& labels, const std::string& name) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == name) return i;
  }
  throw std::runtime_error("no species " + name);
}

double value_of(const OdeSystem& sys, const std::string& name) {
  return sys.param_values.at(label_index(sys.param_names, name));
}

const Reaction* reaction_with(const ReactionSystem& rs, std::vector<std::size_t> reactants) {
  for (const auto& r : rs.reactions) {
    if (r.reactants == reactants) return &r;
  }
  return nullptr;
}

Expr param_var(const ReactionSystem& rs, const std::string& name) {
  return Expr::var(VarKind::Param, label_index(rs.param_names, name), name);
}

Outcome ac1() {
  Outcome o;
  struct Case {
    const char* model;
    std::size_t order;
    const char* k;
    double coefficient;
    const char* label;
  };
  for (const Case& c : {Case{"dimer.bond", 2, "k2", 0.5, "A"}, Case{"trimer.bond", 3, "k3", 1.0 / 6.0, "A"},
                        Case{"bivalent.bond", 2, "k", 1.0, "B"}}) {
    ReactionSystem rs = compile(load_model(c.model));
    std::size_t x = label_index(rs.labels, c.label);
    const Reaction* r = reaction_with(rs, std::vector<std::size_t>(c.order, x));
    o.require(r != nullptr, std::string(c.model) + ": no binding reaction");
    if (!r) continue;
    std::vector<Expr> factors{Expr::constant(c.coefficient), param_var(rs, c.k)};
    for (std::size_t i = 0; i < c.order; ++i) factors.push_back(Expr::var(VarKind::Species, x, c.label));
    std::string want = structural_key(simplify(Expr::mul(factors)));
    std::string got = structural_key(simplify(r->rate));
    o.require(got == want, std::string(c.model) + ": rate " + got + " != " + want);
  }
  return o;
}

Outcome ac2() {
  Outcome o;
  std::ostringstream out, err;
  int code = cli::run({"odes", bond::testing::model_path("kuznetsov.bond"), "--format", "text"}, out, err);
  o.require(code == 0, "bondc odes failed: " + err.str());
  std::string text = out.str();
  o.require(std::count(text.begin(), text.end(), '\n') == 4, "expected four equations");

  OdeSystem sys = build_odes(compile(load_model("kuznetsov.bond")));
  std::size_t TC = label_index(sys.labels, "TC"), EC = label_index(sys.labels, "EC"),
              C = label_index(sys.labels, "ECTC"), IS = label_index(sys.labels, "IS");
  auto p = [&](const char* n) { return value_of(sys, n); };
  o.require(sys.derivatives[IS].is_constant(0.0), "d[IS]/dt is not identically 0");
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int i = 0; i < 25; ++i) {
    std::vector<double> x = bond::testing::random_point(4, rng, 1e3, 2e7);
    auto dx = eval_field(sys, x);
    double bind = p("k1") * x[EC] * x[TC];
    double ec = p("s") + p("f") * x[C] / (p("g") + x[TC]) - p("d1") * x[EC] - bind + (p("km1") + p("k2")) * x[C];
    double tc = p("a") * x[TC] * (1 - p("b") * (x[TC] + x[C])) - bind + (p("km1") + p("k3")) * x[C];
    double c = bind - (p("km1") + p("k2") + p("k3")) * x[C];
    worst = std::max({worst, rel_diff(dx[EC], ec), rel_diff(dx[TC], tc), rel_diff(dx[C], c)});
    o.require(dx[IS] == 0.0, "d[IS]/dt nonzero");
  }
  o.require(worst <= 1e-10, "max relative deviation " + format_number(worst));
  return o;
}

Outcome ac3() {
  Outcome o;
  OdeSystem mm = build_odes(compile(load_model("mm.bond")));
  std::size_t S = label_index(mm.labels, "S"), E = label_index(mm.labels, "E"), P = label_index(mm.labels, "P");
  std::mt19937_64 rng(11);
  for (int i = 0; i < 25; ++i) {
    auto x = bond::testing::random_point(3, rng);
    auto dx = eval_field(mm, x);
    double v = value_of(mm, "Vmax") * x[S] * x[E] / (value_of(mm, "k") + x[E]);
    o.require(rel_diff(dx[S], -v) <= 1e-12, "d[S]/dt mismatch");
    o.require(rel_diff(dx[P], v - value_of(mm, "k3") * x[P]) <= 1e-12, "d[P]/dt mismatch");
  }
  o.require(mm.derivatives[E].is_constant(0.0), "d[E]/dt is not identically 0");

  OdeSystem ma = build_odes(compile(load_model("enzyme_ma.bond")));
  std::size_t e = label_index(ma.labels, "E");
  std::size_t complex = ma.size();
  for (std::size_t i = 0; i < ma.size(); ++i) {
    if (ma.labels[i] != "S" && ma.labels[i] != "E" && ma.labels[i] != "P") complex = i;
  }
  o.require(ma.size() == 4 && complex < ma.size(), "enzyme model should have exactly one complex");
  if (complex < ma.size()) {
    Expr total = simplify(Expr::add({ma.derivatives[e], ma.derivatives[complex]}));
    o.require(total.is_constant(0.0), "d(E + C)/dt does not simplify to 0");
  }
  return o;
}

Outcome ac4() {
  Outcome o;
  std::mt19937_64 rng(4);
  for (const auto& name : bond::testing::corpus()) {
    Model m = load_model(name);
    std::size_t widest = 0;
    for (const auto& e : m.affinity) widest = std::max(widest, e.pattern.clusters.size());
    if (widest > 3) continue;
    ReactionSystem rs = compile(m);
    for (int trial = 0; trial < 10; ++trial) {
      std::vector<double> x = bond::testing::random_point(rs.index.size(), rng);
      auto oracle = bond::testing::brute_force_rates(m, rs.index, x);
      o.require(oracle.size() == rs.reactions.size(), name + ": reaction count differs from enumeration");
      EvalEnv env;
      env.params = rs.param_values;
      env.species = x;
      for (const auto& r : rs.reactions) {
        auto it = oracle.find({r.reactants, r.products});
        if (it == oracle.end()) {
          o.require(false, name + ": reaction missing from enumeration");
          continue;
        }
        double d = rel_diff(evaluate(r.rate, env), it->second);
        o.require(d <= 1e-9, name + ": relative deviation " + format_number(d));
      }
    }
  }
  return o;
}

Outcome ac5() {
  Outcome o;
  IntegrateOptions io;
  io.rtol = 1e-8;
  io.grid = 1;
  Trajectory decay = integrate([](double, const std::vector<double>& x, std::vector<double>& dx) { dx = {-x[0]}; },
                               {1.0}, 1.0, io);
  double err = std::abs(decay.rows.back()[0] - std::exp(-1.0));
  o.require(err <= 1e-6, "decay end-state error " + format_number(err));

  for (const auto& name : bond::testing::corpus()) {
    OdeSystem sys = build_odes(compile(load_model(name)));
    IntegrateOptions opt;
    opt.grid = 200;
    double t_end = name == "kuznetsov.bond" ? 500.0 : 20.0;
    Trajectory tr = integrate(sys, sys.initial, t_end, opt);
    for (const auto& c : conservation_laws(sys)) {
      auto total = [&](const std::vector<double>& x) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(c[i]) * x[i];
        return s;
      };
      double start = total(tr.rows.front());
      for (const auto& row : tr.rows) {
        double drift = std::abs(total(row) - start);
        o.require(drift <= 10 * opt.atol, name + ": conserved quantity drifted by " + format_number(drift));
      }
    }
  }
  return o;
}

Outcome ac6() {
  Outcome o;
  OdeSystem sys = build_odes(compile(load_model("kuznetsov.bond")));
  IntegrateOptions io;
  io.grid = 2000;
  Trajectory tr = integrate(sys, sys.initial, 1000.0, io);
  std::size_t TC = label_index(sys.labels, "TC");
  int maxima = 0;
  for (std::size_t k = 1; k + 1 < tr.rows.size(); ++k) {
    if (tr.rows[k][TC] > tr.rows[k - 1][TC] && tr.rows[k][TC] >= tr.rows[k + 1][TC]) ++maxima;
  }
  o.require(maxima >= 2, "only " + std::to_string(maxima) + " local maxima of [TC]");
  o.detail = o.ok ? std::to_string(maxima) + " maxima" : o.detail;
  return o;
}

Outcome ac7() {
  Outcome o;
  ReactionSystem rs = compile(load_model("enzyme_ma.bond"));
  const double h = 0.001;
  DiscreteSystem ds = discretize(rs, h);
  for (std::size_t i = 0; i < ds.species(); ++i) {
    if (rs.initial[i] > 0) o.require(ds.initial[i] >= 500, "initial level below 500");
  }
  SsaOptions so;
  so.t_end = 5.0;
  so.sample_dt = 1.0;
  so.seed = 20240601;
  auto runs = run_ensemble(ds, ds.initial, so, 200);
  EnsembleStats st = aggregate(ds, runs);

  OdeSystem sys = build_odes(rs);
  IntegrateOptions io;
  io.rtol = 1e-9;
  io.atol = 1e-12;
  io.grid = 5;
  Trajectory tr = integrate(sys, sys.initial, so.t_end, io);
  o.require(st.times.size() == tr.times.size(), "checkpoint grids differ");
  double worst = 0.0;
  for (std::size_t k = 1; k < st.times.size() && k < tr.times.size(); ++k) {
    for (std::size_t i = 0; i < sys.size(); ++i) {
      double se = st.stddev[k][i] / std::sqrt(200.0);
      double gap = std::abs(st.mean[k][i] - tr.rows[k][i]);
      worst = std::max(worst, se > 0 ? gap / se : gap * 1e12);
    }
  }
  o.require(worst <= 3.0, "mean deviates by " + format_number(worst) + " standard errors");

  SsaOptions rec = so;
  rec.record_events = true;
  SsaRun a = gillespie(ds, ds.initial, rec, 17);
  SsaRun b = gillespie(ds, ds.initial, rec, 17);
  o.require(a.event_times == b.event_times && a.event_indices == b.event_indices && a.levels == b.levels,
            "reruns differ");
  o.require(runs_csv(ds, runs) == runs_csv(ds, run_ensemble(ds, ds.initial, so, 200)), "ensemble reruns differ");
  if (o.ok) o.detail = "max " + format_number(std::round(worst * 100) / 100) + " SE";
  return o;
}

Outcome ac8() {
  Outcome o;
  bond::testing::TermGenerator gen(8);
  const Definitions& defs = gen.defs();
  auto keys = [](const std::vector<CanonicalSpecies>& ps) {
    std::vector<std::string> out;
    for (const auto& p : ps) out.push_back(p.key);
    std::sort(out.begin(), out.end());
    return out;
  };
  auto lines = [&](const SpeciesTerm& t) {
    std::vector<std::string> out;
    for (const auto& e : transitions(t, defs)) out.push_back(e.to_string());
    std::sort(out.begin(), out.end());
    return out;
  };
  for (int i = 0; i < 1000 && o.ok; ++i) {
    SpeciesTerm t = gen.term(5);
    SpeciesTerm u = gen.term(5);
    CanonicalSpecies n = normalize(t, defs);
    o.require(normalize(n.term, defs).key == n.key, "not idempotent: " + to_string(t));
    auto left = keys(primes(t, defs));
    auto right = keys(primes(u, defs));
    left.insert(left.end(), right.begin(), right.end());
    std::sort(left.begin(), left.end());
    o.require(keys(primes(SpeciesTerm::parallel({t, u}), defs)) == left,
              "primes do not factorize: " + to_string(t) + " | " + to_string(u));
    o.require(lines(t) == lines(n.term), "transitions changed by normalization: " + to_string(t));
  }
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    double budget_s;
    Outcome (*fn)();
  };
  const Criterion criteria[] = {
      {"AC1", "rate combinatorics (dimer, trimer, two-site monomer)", 1.0, ac1},
      {"AC2", "Kuznetsov ODE reproduction", 2.0, ac2},
      {"AC3", "Michaelis-Menten corpus and enzyme conservation", 1.0, ac3},
      {"AC4", "slot-wise rates match brute-force enumeration", 10.0, ac4},
      {"AC5", "integrator convergence and conservation", 5.0, ac5},
      {"AC6", "Kuznetsov oscillation", 5.0, ac6},
      {"AC7", "SSA fluid consistency and determinism", 60.0, ac7},
      {"AC8", "normalization and prime properties on 1000 terms", 30.0, ac8},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.ok = false;
      o.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.ok && secs > c.budget_s) {
      o.ok = false;
      o.detail = "over time budget";
    }
    if (!o.ok) ++failures;
    char timing[64];
    std::snprintf(timing, sizeof timing, "%.3fs / %.0fs", secs, c.budget_s);
    std::cout << (o.ok ? "[PASS] " : "[FAIL] ") << c.id << " " << c.title << " (" << timing << ")";
    if (!o.detail.empty()) std::cout << ": " << o.detail;
    std::cout << "\n";
  }
  return failures == 0 ? 0 : 1;
}
