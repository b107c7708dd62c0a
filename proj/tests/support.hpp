// Shared helpers for the unit, property and acceptance tests.
#ifndef BOND_TESTS_SUPPORT_HPP
#define BOND_TESTS_SUPPORT_HPP

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bond/congruence.hpp"
#include "bond/parser.hpp"
#include "bond/reactions.hpp"
#include "bond/transitions.hpp"

namespace bond::testing {

inline std::string model_path(const std::string& name) { return std::string(BOND_MODELS_DIR) + "/" + name; }

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Model load_model(const std::string& name) { return parse_model(read_text(model_path(name))); }

inline const std::vector<std::string>& corpus() {
  static const std::vector<std::string> names{"mm.bond",        "enzyme_ma.bond", "dimer.bond",
                                              "trimer.bond",    "bivalent.bond",  "pingpong.bond",
                                              "inhibitor.bond", "kuznetsov.bond"};
  return names;
}

inline double rel_diff(double a, double b) {
  double scale = std::max({std::abs(a), std::abs(b), 1e-300});
  return std::abs(a - b) / scale;
}

/// Species variables drawn uniformly from [lo, hi).
inline std::vector<double> random_point(std::size_t n, std::mt19937_64& rng, double lo = 0.1, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

using ReactionKey = std::pair<std::vector<std::size_t>, std::vector<std::size_t>>;

/// Reaction rates from the definition of the interaction semantics: every
/// ordered m-tuple of ambient transitions of primes whose cluster bag equals
/// the pattern contributes (1/m!) * f(a) * prod_i (mu_i x_i / a_{c_i}),
/// with products from committing the colocated targets.
inline std::map<ReactionKey, double> brute_force_rates(const Model& model, const PrimeIndex& index,
                                                       const std::vector<double>& x) {
  struct Offer {
    std::size_t prime;
    TransitionEntry entry;
  };
  std::vector<Offer> offers;
  for (std::size_t p = 0; p < index.size(); ++p) {
    for (const auto& t : transitions(index[p].term, model.species)) {
      if (t.location.is_ambient()) offers.push_back(Offer{p, t});
    }
  }
  std::map<Cluster, double> conc;
  for (const auto& o : offers) conc[o.entry.cluster] += static_cast<double>(o.entry.multiplicity) * x[o.prime];

  const std::vector<double> params = model.param_values();
  std::map<ReactionKey, double> rates;
  for (const auto& entry : model.affinity) {
    const std::size_t m = entry.pattern.clusters.size();
    const KineticLaw* law = model.find_law(entry.law);
    std::vector<double> law_params;
    for (const auto& a : entry.args) {
      if (const double* v = std::get_if<double>(&a)) {
        law_params.push_back(*v);
      } else {
        law_params.push_back(params[*model.param_index(std::get<std::string>(a))]);
      }
    }
    std::vector<double> args;
    for (const auto& c : entry.pattern.clusters) args.push_back(conc.count(c) ? conc[c] : 0.0);
    EvalEnv env;
    env.params = params;
    env.args = args;
    env.law_params = law_params;
    const double f = evaluate(law->body_for(m), env);
    const std::vector<Cluster> want = entry.pattern.sorted();
    double inv_fact = 1.0;
    for (std::size_t i = 2; i <= m; ++i) inv_fact /= static_cast<double>(i);

    std::vector<std::size_t> pick(m, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
      if (depth == m) {
        std::vector<Cluster> got;
        for (auto i : pick) got.push_back(offers[i].entry.cluster);
        std::sort(got.begin(), got.end());
        if (got != want) return;
        double w = inv_fact * f;
        Abstraction joined = offers[pick[0]].entry.target.abstraction;
        std::vector<std::size_t> reactants;
        for (std::size_t k = 0; k < m; ++k) {
          const Offer& o = offers[pick[k]];
          w *= static_cast<double>(o.entry.multiplicity) * x[o.prime] / conc[o.entry.cluster];
          reactants.push_back(o.prime);
          if (k > 0) joined = colocate(joined, o.entry.target.abstraction);
        }
        std::vector<std::size_t> products;
        for (const auto& q : prime_factors(commit(joined, model.species))) products.push_back(*index.find(q.key));
        std::sort(reactants.begin(), reactants.end());
        std::sort(products.begin(), products.end());
        rates[{reactants, products}] += w;
        return;
      }
      for (std::size_t i = 0; i < offers.size(); ++i) {
        pick[depth] = i;
        rec(depth + 1);
      }
    };
    rec(0);
  }
  return rates;
}

/// Random species terms over a fixed set of definitions, for property tests.
class TermGenerator {
 public:
  explicit TermGenerator(std::uint64_t seed) : rng_(seed) {
    defs_ = parse_model(
                "species A = a.A + b(m).B(m);\n"
                "species B(l) = c@l.A + a@l.0;\n"
                "species C = (A | new k in B(k));\n"
                "species D(l) = new n in (B(n) | c@l(q).B(q));\n")
                .species;
  }

  const Definitions& defs() const { return defs_; }

  SpeciesTerm term(int depth) {
    std::vector<std::string> scope{"x", "y"};
    return gen(depth, scope);
  }

 private:
  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

  std::string name(const std::vector<std::string>& scope) { return scope[pick(scope.size())]; }

  SpeciesTerm gen(int depth, std::vector<std::string>& scope) {
    std::size_t choice = depth <= 0 ? pick(2) * 4 : pick(6);
    switch (choice) {
      case 0:
      default:
        return leaf(scope);
      case 1:
      case 2: {
        std::size_t n = 1 + pick(3);
        std::vector<PrefixGuard> guards;
        for (std::size_t i = 0; i < n; ++i) guards.push_back(guard(depth, scope));
        return SpeciesTerm::sum(std::move(guards));
      }
      case 3: {
        std::size_t n = 2 + pick(2);
        std::vector<SpeciesTerm> parts;
        for (std::size_t i = 0; i < n; ++i) parts.push_back(gen(depth - 1, scope));
        return SpeciesTerm::parallel(std::move(parts));
      }
      case 4: {
        std::vector<std::string> bound = fresh("r", 1 + (pick(3) == 0 ? 1 : 0));
        auto inner = scope;
        inner.insert(inner.end(), bound.begin(), bound.end());
        return SpeciesTerm::restriction(bound, gen(depth - 1, inner));
      }
      case 5:
        return SpeciesTerm::parallel({gen(depth - 1, scope), leaf(scope)});
    }
  }

  SpeciesTerm leaf(const std::vector<std::string>& scope) {
    switch (pick(5)) {
      case 0: return SpeciesTerm::nil();
      case 1: return SpeciesTerm::invoke("A");
      case 2: return SpeciesTerm::invoke("B", {name(scope)});
      case 3: return SpeciesTerm::invoke("C");
      default: return SpeciesTerm::invoke("D", {name(scope)});
    }
  }

  PrefixGuard guard(int depth, const std::vector<std::string>& scope) {
    static const char* sites[] = {"a", "b", "c"};
    PrefixGuard g;
    g.site = Site{sites[pick(3)]};
    g.location = pick(2) == 0 ? Location::ambient() : Location::named(name(scope));
    auto inner = scope;
    g.received = fresh("m", pick(3));
    inner.insert(inner.end(), g.received.begin(), g.received.end());
    g.continuation = gen(depth - 1, inner);
    return g;
  }

  // `count` distinct binder names from a small pool, so that shadowing and
  // capture occur.
  std::vector<std::string> fresh(const std::string& base, std::size_t count) {
    std::size_t start = pick(3);
    std::vector<std::string> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(base + std::to_string((start + i) % 3));
    return out;
  }

  std::mt19937_64 rng_;
  Definitions defs_;
};

/// Renames every binder to `<prefix><n>` and reverses every sum and parallel
/// composition; the result is congruent to `term` when no free name starts
/// with `prefix`.
inline SpeciesTerm rename_binders(const SpeciesTerm& term, const std::string& prefix, int& counter) {
  return std::visit(
      [&](const auto& node) -> SpeciesTerm {
        using T = std::decay_t<decltype(node)>;
        if constexpr (std::is_same_v<T, NilTerm> || std::is_same_v<T, InvokeTerm>) {
          return term;
        } else if constexpr (std::is_same_v<T, SumTerm>) {
          std::vector<PrefixGuard> guards;
          for (const auto& g : node.guards) {
            Renaming r;
            PrefixGuard out = g;
            for (auto& m : out.received) {
              std::string fresh = prefix + std::to_string(counter++);
              r[m] = fresh;
              m = fresh;
            }
            out.continuation = rename_binders(rename_locations(g.continuation, r), prefix, counter);
            guards.push_back(std::move(out));
          }
          std::reverse(guards.begin(), guards.end());
          return SpeciesTerm::sum(std::move(guards));
        } else if constexpr (std::is_same_v<T, ParallelTerm>) {
          std::vector<SpeciesTerm> parts;
          for (const auto& p : node.parts) parts.push_back(rename_binders(p, prefix, counter));
          std::reverse(parts.begin(), parts.end());
          return SpeciesTerm::parallel(std::move(parts));
        } else {
          Renaming r;
          std::vector<std::string> bound;
          for (const auto& m : node.bound) {
            std::string fresh = prefix + std::to_string(counter++);
            r[m] = fresh;
            bound.push_back(fresh);
          }
          return SpeciesTerm::restriction(bound, rename_binders(rename_locations(node.body, r), prefix, counter));
        }
      },
      term.node().value);
}

}  // namespace bond::testing

#endif  // BOND_TESTS_SUPPORT_HPP
