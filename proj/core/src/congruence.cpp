#include "bond/congruence.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>

#include "bond/error.hpp"

namespace bond {

namespace {

constexpr int kUnfoldLimit = 64;
constexpr std::size_t kExhaustiveBinders = 6;

std::string binder_name(std::size_t i) { return "l" + std::to_string(i); }

std::string join_parts(const std::vector<std::string>& parts) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += " | ";
    out += parts[i];
  }
  return out;
}

// Identifier tokens of `text` in order of appearance.
std::vector<std::string> identifiers(const std::string& text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    char c = text[i];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '\'')) {
        ++j;
      }
      out.push_back(text.substr(i, j - i));
      i = j;
    } else {
      ++i;
    }
  }
  return out;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) { parent_[find(a)] = find(b); }

 private:
  std::vector<std::size_t> parent_;
};

struct Pool {
  std::vector<SpeciesTerm> atoms;
  std::vector<std::string> binders;
};

class Normalizer {
 public:
  explicit Normalizer(const Definitions& defs) : defs_(defs) {}

  // Invocations are unfolded only outside guards: a continuation stays as
  // written until it fires and is normalized as a top-level species.
  SpeciesTerm normalize(const SpeciesTerm& term, bool unfold = true) {
    Pool pool;
    flatten(term, pool, unfold ? 0 : -1);

    std::vector<NameSet> atom_free;
    atom_free.reserve(pool.atoms.size());
    for (const auto& a : pool.atoms) atom_free.push_back(free_locations(a));

    UnionFind uf(pool.atoms.size());
    std::vector<std::vector<std::size_t>> users(pool.binders.size());
    for (std::size_t b = 0; b < pool.binders.size(); ++b) {
      for (std::size_t a = 0; a < pool.atoms.size(); ++a) {
        if (atom_free[a].count(pool.binders[b])) users[b].push_back(a);
      }
      for (std::size_t i = 1; i < users[b].size(); ++i) uf.unite(users[b][0], users[b][i]);
    }

    std::map<std::size_t, std::pair<std::vector<SpeciesTerm>, std::vector<std::string>>> groups;
    for (std::size_t a = 0; a < pool.atoms.size(); ++a) groups[uf.find(a)].first.push_back(pool.atoms[a]);
    for (std::size_t b = 0; b < pool.binders.size(); ++b) {
      if (users[b].empty()) continue;
      groups[uf.find(users[b][0])].second.push_back(pool.binders[b]);
    }

    std::vector<std::pair<std::string, SpeciesTerm>> parts;
    for (auto& [root, group] : groups) {
      SpeciesTerm p = prime(group.first, group.second);
      parts.emplace_back(to_string(p), p);
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<SpeciesTerm> terms;
    terms.reserve(parts.size());
    for (auto& [key, t] : parts) terms.push_back(std::move(t));
    return SpeciesTerm::parallel(std::move(terms));
  }

 private:
  void flatten(const SpeciesTerm& term, Pool& pool, int depth) {
    std::visit(
        [&](const auto& node) {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, NilTerm>) {
          } else if constexpr (std::is_same_v<T, SumTerm>) {
            pool.atoms.push_back(term);
          } else if constexpr (std::is_same_v<T, ParallelTerm>) {
            for (const auto& p : node.parts) flatten(p, pool, depth);
          } else if constexpr (std::is_same_v<T, RestrictionTerm>) {
            Renaming r;
            for (const auto& b : node.bound) {
              std::string internal = "#" + std::to_string(counter_++);
              r[b] = internal;
              pool.binders.push_back(internal);
            }
            flatten(rename_locations(node.body, r), pool, depth);
          } else {
            const SpeciesDef* def = defs_.find(node.name);
            if (depth < 0 || !def || def->body.template as<SumTerm>()) {
              pool.atoms.push_back(term);
              return;
            }
            if (depth >= kUnfoldLimit) {
              throw BondError(ErrorCode::Unbounded,
                              "unguarded recursion while unfolding species '" + node.name + "'");
            }
            flatten(defs_.instantiate(*def, node.args), pool, depth + 1);
          }
        },
        term.node().value);
  }

  // Normal form of a single atom whose free names are final.
  SpeciesTerm atom(const SpeciesTerm& a) {
    const auto* sum = a.as<SumTerm>();
    if (!sum) return a;
    std::vector<std::pair<std::string, PrefixGuard>> guards;
    for (const auto& g : sum->guards) {
      NameSet free = free_locations(g.continuation);
      for (const auto& m : g.received) free.erase(m);
      if (!g.location.is_ambient()) free.insert(g.location.name());
      std::size_t base = binder_base(free);
      Renaming r;
      std::vector<std::string> received;
      for (std::size_t i = 0; i < g.received.size(); ++i) {
        received.push_back(binder_name(base + i));
        if (g.received[i] != received.back()) r[g.received[i]] = received.back();
      }
      SpeciesTerm cont = r.empty() ? g.continuation : rename_locations(g.continuation, r);
      PrefixGuard ng{g.site, g.location, std::move(received), normalize(cont, false)};
      std::string key = to_string(SpeciesTerm::sum({ng}));
      guards.emplace_back(std::move(key), std::move(ng));
    }
    std::sort(guards.begin(), guards.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<PrefixGuard> out;
    out.reserve(guards.size());
    for (auto& [key, g] : guards) out.push_back(std::move(g));
    return SpeciesTerm::sum(std::move(out));
  }

  struct Candidate {
    std::string key;
    SpeciesTerm term;
  };

  // Atoms under the given binder -> canonical-name assignment.
  Candidate build(const std::vector<SpeciesTerm>& atoms, const std::vector<std::string>& binders,
                  const std::vector<std::size_t>& order, std::size_t base) {
    Renaming r;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < order.size(); ++i) {
      names.push_back(binder_name(base + i));
      r[binders[order[i]]] = names.back();
    }
    std::vector<std::pair<std::string, SpeciesTerm>> parts;
    for (const auto& a : atoms) {
      SpeciesTerm na = atom(rename_locations(a, r));
      parts.emplace_back(to_string(na), na);
    }
    std::sort(parts.begin(), parts.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    std::vector<std::string> keys;
    std::vector<SpeciesTerm> terms;
    for (auto& [k, t] : parts) {
      keys.push_back(k);
      terms.push_back(std::move(t));
    }
    SpeciesTerm t = SpeciesTerm::restriction(names, SpeciesTerm::parallel(std::move(terms)));
    return Candidate{join_parts(keys), std::move(t)};
  }

  SpeciesTerm prime(const std::vector<SpeciesTerm>& atoms, const std::vector<std::string>& binders) {
    if (binders.empty()) return atom(atoms.front());
    NameSet free;
    for (const auto& a : atoms) {
      NameSet fa = free_locations(a);
      free.insert(fa.begin(), fa.end());
    }
    for (const auto& b : binders) free.erase(b);
    std::size_t base = binder_base(free);

    std::vector<std::size_t> order(binders.size());
    std::iota(order.begin(), order.end(), 0);
    if (binders.size() <= kExhaustiveBinders) {
      Candidate best = build(atoms, binders, order, base);
      while (std::next_permutation(order.begin(), order.end())) {
        Candidate c = build(atoms, binders, order, base);
        if (c.key < best.key) best = std::move(c);
      }
      return best.term;
    }

    // Large complexes: renumber binders by first occurrence until stable.
    Candidate current = build(atoms, binders, order, base);
    for (std::size_t round = 0; round < binders.size() + 2; ++round) {
      std::vector<std::size_t> next;
      for (const auto& tok : identifiers(current.key)) {
        if (tok.size() < 2 || tok[0] != 'l') continue;
        if (!std::all_of(tok.begin() + 1, tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
          continue;
        }
        std::size_t idx = std::stoul(tok.substr(1));
        if (idx < base || idx >= base + binders.size()) continue;
        std::size_t orig = order[idx - base];
        if (std::find(next.begin(), next.end(), orig) == next.end()) next.push_back(orig);
      }
      for (std::size_t i = 0; i < binders.size(); ++i) {
        if (std::find(next.begin(), next.end(), order[i]) == next.end()) next.push_back(order[i]);
      }
      if (next == order) break;
      order = std::move(next);
      Candidate c = build(atoms, binders, order, base);
      if (c.key == current.key) break;
      current = std::move(c);
    }
    return current.term;
  }

  const Definitions& defs_;
  std::size_t counter_ = 0;
};

}  // namespace

std::size_t binder_base(const NameSet& free) {
  std::size_t base = 0;
  for (const auto& n : free) {
    if (n.size() < 2 || n[0] != 'l' || n.size() > 12) continue;
    if (!std::all_of(n.begin() + 1, n.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
      continue;
    }
    base = std::max(base, static_cast<std::size_t>(std::stoull(n.substr(1))) + 1);
  }
  return base;
}

CanonicalSpecies normalize(const SpeciesTerm& term, const Definitions& defs) {
  SpeciesTerm t = Normalizer(defs).normalize(term);
  std::string key = to_string(t);
  return CanonicalSpecies{std::move(t), std::move(key)};
}

CanonicalAbstraction normalize(const Abstraction& abstraction, const Definitions& defs) {
  NameSet free = free_locations(abstraction);
  std::size_t base = binder_base(free);
  Renaming r;
  std::vector<std::string> bound;
  for (std::size_t i = 0; i < abstraction.bound.size(); ++i) {
    bound.push_back(binder_name(base + i));
    if (abstraction.bound[i] != bound.back()) r[abstraction.bound[i]] = bound.back();
  }
  SpeciesTerm body = r.empty() ? abstraction.body : rename_locations(abstraction.body, r);
  Abstraction out{std::move(bound), Normalizer(defs).normalize(body)};
  std::string key = to_string(out);
  return CanonicalAbstraction{std::move(out), std::move(key)};
}

std::vector<CanonicalSpecies> prime_factors(const CanonicalSpecies& species) {
  std::vector<CanonicalSpecies> out;
  if (species.term.is_nil()) return out;
  if (const auto* par = species.term.as<ParallelTerm>()) {
    for (const auto& p : par->parts) out.push_back(CanonicalSpecies{p, to_string(p)});
  } else {
    out.push_back(species);
  }
  return out;
}

std::vector<CanonicalSpecies> primes(const SpeciesTerm& term, const Definitions& defs) {
  return prime_factors(normalize(term, defs));
}

void Mixture::add(const CanonicalSpecies& prime, double amount) {
  auto it = entries_.find(prime.key);
  if (it == entries_.end()) {
    if (amount != 0.0) entries_.emplace(prime.key, Entry{prime, amount});
    return;
  }
  it->second.amount += amount;
  if (it->second.amount == 0.0) entries_.erase(it);
}

double Mixture::get(const std::string& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? 0.0 : it->second.amount;
}

Mixture embed(const SpeciesTerm& term, const Definitions& defs) {
  Mixture m;
  for (const auto& p : primes(term, defs)) m.add(p, 1.0);
  return m;
}

}  // namespace bond
