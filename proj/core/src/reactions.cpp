#include "bond/reactions.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bond/error.hpp"

namespace bond {

namespace {

double factorial(std::size_t n) {
  double out = 1.0;
  for (std::size_t i = 2; i <= n; ++i) out *= static_cast<double>(i);
  return out;
}

// Ambient options per cluster over primes [0, count).
std::map<Cluster, std::vector<SlotOption>> ambient_options(const PrimeIndex& index, std::size_t count,
                                                           TransitionCache& cache) {
  std::map<Cluster, std::vector<SlotOption>> out;
  for (std::size_t p = 0; p < count; ++p) {
    for (const auto& t : *cache.get(index[p])) {
      if (!t.location.is_ambient()) continue;
      out[t.cluster].push_back(SlotOption{p, t.multiplicity, t.target.abstraction});
    }
  }
  return out;
}

// Calls fn(choices) for every tuple of the cartesian product of option lists.
template <class Fn>
void for_each_tuple(const std::vector<std::size_t>& sizes, Fn&& fn) {
  for (auto s : sizes) {
    if (s == 0) return;
  }
  std::vector<std::size_t> choice(sizes.size(), 0);
  while (true) {
    fn(choice);
    std::size_t j = sizes.size();
    while (j > 0) {
      --j;
      if (++choice[j] < sizes[j]) break;
      choice[j] = 0;
      if (j == 0) return;
    }
    if (sizes.empty()) return;
  }
}

void initial_primes(const Model& model, std::vector<double>* amounts, PrimeIndex& index) {
  for (const auto& item : model.mixture) {
    for (const auto& p : primes(SpeciesTerm::invoke(item.species), model.species)) {
      std::size_t i = index.add(p);
      if (amounts) {
        if (amounts->size() <= i) amounts->resize(i + 1, 0.0);
        (*amounts)[i] += item.concentration;
      }
    }
  }
}

}  // namespace

std::size_t PrimeIndex::add(const CanonicalSpecies& prime) {
  auto it = lookup_.find(prime.key);
  if (it != lookup_.end()) return it->second;
  lookup_.emplace(prime.key, primes_.size());
  primes_.push_back(prime);
  return primes_.size() - 1;
}

std::optional<std::size_t> PrimeIndex::find(const std::string& key) const {
  auto it = lookup_.find(key);
  if (it == lookup_.end()) return std::nullopt;
  return it->second;
}

std::vector<CanonicalSpecies> product_of(const std::vector<const Abstraction*>& targets, const Definitions& defs) {
  Abstraction acc;
  for (const auto* t : targets) acc = colocate(acc, *t);
  return prime_factors(commit(acc, defs));
}

PrimeIndex reachable_primes(const Model& model, std::size_t cap) {
  PrimeIndex index;
  initial_primes(model, nullptr, index);
  if (index.size() > cap) {
    throw BondError(ErrorCode::Unbounded, "initial mixture has more than " + std::to_string(cap) + " primes");
  }
  TransitionCache cache(model.species);
  std::set<std::string> explored;
  bool grew = true;
  while (grew) {
    grew = false;
    std::size_t count = index.size();
    auto options = ambient_options(index, count, cache);
    for (std::size_t e = 0; e < model.affinity.size(); ++e) {
      const auto& clusters = model.affinity[e].pattern.clusters;
      std::vector<const std::vector<SlotOption>*> lists;
      std::vector<std::size_t> sizes;
      for (const auto& c : clusters) {
        auto it = options.find(c);
        static const std::vector<SlotOption> kNone;
        lists.push_back(it == options.end() ? &kNone : &it->second);
        sizes.push_back(lists.back()->size());
      }
      for_each_tuple(sizes, [&](const std::vector<std::size_t>& choice) {
        std::string key = std::to_string(e);
        std::vector<const Abstraction*> targets;
        for (std::size_t j = 0; j < choice.size(); ++j) {
          const SlotOption& o = (*lists[j])[choice[j]];
          key += ":" + std::to_string(o.prime) + "/" + to_string(o.target);
          targets.push_back(&o.target);
        }
        if (!explored.insert(key).second) return;
        for (const auto& p : product_of(targets, model.species)) {
          std::size_t before = index.size();
          index.add(p);
          if (index.size() > before) {
            grew = true;
            if (index.size() > cap) {
              throw BondError(ErrorCode::Unbounded,
                              "more than " + std::to_string(cap) +
                                  " reachable primes: possibly unbounded species set (polymerisation-like model)");
            }
          }
        }
      });
    }
  }
  return index;
}

Expr LinearForm::to_expr(const PrimeIndex& index) const {
  std::vector<Expr> parts;
  for (const auto& [p, mu] : terms) {
    Expr x = Expr::var(VarKind::Species, p, index[p].key);
    parts.push_back(mu == 1 ? x : Expr::mul({Expr::constant(static_cast<double>(mu)), x}));
  }
  if (parts.empty()) return Expr::constant(0.0);
  if (parts.size() == 1) return parts.front();
  return Expr::add(std::move(parts));
}

std::map<Cluster, LinearForm> cluster_concentrations(const PrimeIndex& index, const Definitions& defs) {
  TransitionCache cache(defs);
  std::map<Cluster, LinearForm> out;
  for (const auto& [cluster, opts] : ambient_options(index, index.size(), cache)) {
    std::map<std::size_t, std::size_t> per_prime;
    for (const auto& o : opts) per_prime[o.prime] += o.multiplicity;
    LinearForm form;
    for (const auto& [p, mu] : per_prime) form.terms.emplace_back(p, mu);
    out.emplace(cluster, std::move(form));
  }
  return out;
}

std::vector<std::pair<std::size_t, int>> Reaction::net() const {
  std::map<std::size_t, int> delta;
  for (auto p : products) ++delta[p];
  for (auto r : reactants) --delta[r];
  std::vector<std::pair<std::size_t, int>> out;
  for (const auto& [p, d] : delta) {
    if (d != 0) out.emplace_back(p, d);
  }
  return out;
}

Expr ReactionSystem::flux_rate(const Flux& flux) const {
  const EntryMatch& m = matches[flux.match];
  std::vector<Expr> factors;
  factors.push_back(Expr::constant(m.symmetry));
  factors.push_back(m.law);
  for (std::size_t j = 0; j < m.slots.size(); ++j) {
    const Slot& slot = m.slots[j];
    if (slot.mode == SlotMode::Cancelled || flux.choices[j] == kAnyOption) continue;
    const SlotOption& o = slot.options[flux.choices[j]];
    Expr x = Expr::var(VarKind::Species, o.prime, species_label(o.prime));
    Expr mux = o.multiplicity == 1 ? x : Expr::mul({Expr::constant(static_cast<double>(o.multiplicity)), x});
    if (slot.mode == SlotMode::Divided) {
      factors.push_back(mux);
    } else {
      factors.push_back(Expr::div(mux, slot.concentration, true));
    }
  }
  return simplify(Expr::mul(std::move(factors)));
}

ReactionSystem extract_reactions(const Model& model, const PrimeIndex& index) {
  ReactionSystem rs;
  rs.index = index;
  for (const auto& p : model.params) {
    rs.param_names.push_back(p.name);
    rs.param_values.push_back(p.value);
  }
  {
    PrimeIndex scratch = index;
    std::vector<double> amounts;
    initial_primes(model, &amounts, scratch);
    amounts.resize(index.size(), 0.0);
    rs.initial = std::move(amounts);
  }

  rs.labels.resize(index.size());
  for (std::size_t i = 0; i < index.size(); ++i) rs.labels[i] = index[i].key;
  std::vector<bool> named(index.size(), false);
  for (const auto& def : model.species.ordered()) {
    if (!def.formals.empty()) continue;
    auto factors = primes(SpeciesTerm::invoke(def.name), model.species);
    if (factors.size() != 1) continue;
    auto idx = index.find(factors.front().key);
    if (idx && !named[*idx]) {
      named[*idx] = true;
      rs.labels[*idx] = def.name;
    }
  }

  TransitionCache cache(model.species);
  auto options = ambient_options(index, index.size(), cache);
  auto concentrations = cluster_concentrations(index, model.species);

  std::map<std::pair<std::vector<std::size_t>, std::vector<std::size_t>>, std::size_t> by_stoich;

  for (std::size_t e = 0; e < model.affinity.size(); ++e) {
    const AffinityEntry& entry = model.affinity[e];
    const KineticLaw* law = model.find_law(entry.law);
    const auto& clusters = entry.pattern.clusters;
    EntryMatch match;
    match.entry = e;

    std::map<Cluster, std::size_t> counts;
    for (const auto& c : clusters) ++counts[c];
    double denom = 1.0;
    for (const auto& [c, n] : counts) denom *= factorial(n);
    match.symmetry = 1.0 / denom;

    Expr body = simplify(law->body_for(clusters.size()));
    bool empty = false;
    for (std::size_t j = 0; j < clusters.size(); ++j) {
      Slot slot;
      slot.cluster = clusters[j];
      if (auto it = options.find(clusters[j]); it != options.end()) slot.options = it->second;
      if (auto it = concentrations.find(clusters[j]); it != concentrations.end()) {
        slot.concentration = it->second.to_expr(index);
      }
      if (slot.options.empty()) empty = true;
      Expr quotient;
      if (slot.options.size() == 1) {
        slot.mode = SlotMode::Cancelled;
      } else if (divide_out(body, Expr::var(VarKind::Arg, j, ""), quotient)) {
        slot.mode = SlotMode::Divided;
        body = simplify(quotient);
      } else {
        slot.mode = SlotMode::Quotient;
      }
      match.slots.push_back(std::move(slot));
    }
    if (empty) {
      rs.warnings.push_back("affinity pattern '" + entry.pattern.to_string() + "' matches no transition");
      continue;
    }

    std::vector<Expr> law_params;
    for (const auto& a : entry.args) {
      if (const double* v = std::get_if<double>(&a)) {
        law_params.push_back(Expr::constant(*v));
      } else {
        const std::string& name = std::get<std::string>(a);
        law_params.push_back(Expr::var(VarKind::Param, *model.param_index(name), name));
      }
    }
    match.law = simplify(substitute(body, [&](const Expr& leaf) -> const Expr* {
      if (leaf.var_kind() == VarKind::LawParam) return &law_params.at(leaf.var_index());
      if (leaf.var_kind() == VarKind::Arg) return &match.slots.at(leaf.var_index()).concentration;
      return nullptr;
    }));

    std::size_t match_index = rs.matches.size();
    rs.matches.push_back(std::move(match));
    const EntryMatch& m = rs.matches.back();

    std::vector<std::size_t> sizes;
    for (const auto& s : m.slots) sizes.push_back(s.options.size());
    for_each_tuple(sizes, [&](const std::vector<std::size_t>& choice) {
      std::vector<std::size_t> reactants;
      std::vector<const Abstraction*> targets;
      for (std::size_t j = 0; j < choice.size(); ++j) {
        const SlotOption& o = m.slots[j].options[choice[j]];
        reactants.push_back(o.prime);
        targets.push_back(&o.target);
      }
      std::vector<std::size_t> products;
      for (const auto& p : product_of(targets, model.species)) {
        auto idx = index.find(p.key);
        if (!idx) {
          throw BondError(ErrorCode::Unbounded, "product '" + p.key + "' is missing from the prime index");
        }
        products.push_back(*idx);
      }
      std::sort(reactants.begin(), reactants.end());
      std::sort(products.begin(), products.end());

      Flux flux{match_index, choice, 0};
      Expr rate = rs.flux_rate(flux);
      auto key = std::make_pair(reactants, products);
      auto it = by_stoich.find(key);
      if (it == by_stoich.end()) {
        it = by_stoich.emplace(key, rs.reactions.size()).first;
        rs.reactions.push_back(Reaction{reactants, products, rate, {}});
      } else {
        Reaction& r = rs.reactions[it->second];
        r.rate = simplify(Expr::add({r.rate, rate}));
      }
      flux.reaction = it->second;
      rs.reactions[it->second].fluxes.push_back(rs.fluxes.size());
      rs.fluxes.push_back(std::move(flux));
    });
  }
  return rs;
}

ReactionSystem compile(const Model& model, std::size_t cap) {
  return extract_reactions(model, reachable_primes(model, cap));
}

}  // namespace bond
