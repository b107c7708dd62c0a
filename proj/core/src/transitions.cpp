#include "bond/transitions.hpp"

#include <algorithm>
#include <mutex>
#include <tuple>

#include "bond/error.hpp"

namespace bond {

namespace {

struct RawEntry {
  Cluster cluster;
  Location location;
  Abstraction target;
  std::size_t multiplicity = 1;
};

NameSet names_of(const Abstraction& f) {
  NameSet out = all_locations(f.body);
  out.insert(f.bound.begin(), f.bound.end());
  return out;
}

class Deriver {
 public:
  Deriver(const Definitions& defs, int depth_limit) : defs_(defs), depth_limit_(depth_limit) {}

  std::vector<RawEntry> derive(const SpeciesTerm& term, int depth) {
    return std::visit(
        [&](const auto& node) -> std::vector<RawEntry> {
          using T = std::decay_t<decltype(node)>;
          if constexpr (std::is_same_v<T, NilTerm>) {
            return {};
          } else if constexpr (std::is_same_v<T, SumTerm>) {
            std::vector<RawEntry> out;
            for (const auto& g : node.guards) {
              out.push_back(RawEntry{Cluster({g.site}), g.location, Abstraction{g.received, g.continuation}, 1});
            }
            return out;
          } else if constexpr (std::is_same_v<T, ParallelTerm>) {
            return derive_parallel(node.parts, depth);
          } else if constexpr (std::is_same_v<T, RestrictionTerm>) {
            std::vector<RawEntry> out;
            for (auto& e : derive(node.body, depth)) {
              bool bound = !e.location.is_ambient() &&
                           std::find(node.bound.begin(), node.bound.end(), e.location.name()) != node.bound.end();
              if (bound) {
                if (e.cluster.size() < 2) continue;
                e.location = Location::ambient();
              }
              e.target = restrict_abstraction(node.bound, e.target);
              out.push_back(std::move(e));
            }
            return out;
          } else {
            const SpeciesDef* def = defs_.find(node.name);
            if (!def) throw BondError(ErrorCode::Parse, "unknown species '" + node.name + "'");
            if (depth + 1 > depth_limit_) {
              throw BondError(ErrorCode::Unbounded,
                              "unfolding '" + node.name + "' exceeded depth " + std::to_string(depth_limit_) +
                                  " (unguarded recursion?)");
            }
            return derive(defs_.instantiate(*def, node.args), depth + 1);
          }
        },
        term.node().value);
  }

 private:
  std::vector<RawEntry> derive_parallel(const std::vector<SpeciesTerm>& parts, int depth) {
    if (parts.empty()) return {};
    SpeciesTerm left = parts[0];
    std::vector<RawEntry> acc = derive(parts[0], depth);
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const SpeciesTerm& right = parts[i];
      std::vector<RawEntry> rhs = derive(right, depth);
      std::vector<RawEntry> next;
      next.reserve(acc.size() + rhs.size());
      Abstraction left_idle{{}, left};
      Abstraction right_idle{{}, right};
      for (const auto& u : acc) {
        next.push_back(RawEntry{u.cluster, u.location, colocate(u.target, right_idle), u.multiplicity});
      }
      for (const auto& v : rhs) {
        next.push_back(RawEntry{v.cluster, v.location, colocate(left_idle, v.target), v.multiplicity});
      }
      for (const auto& u : acc) {
        if (u.location.is_ambient()) continue;
        for (const auto& v : rhs) {
          if (v.location != u.location) continue;
          next.push_back(RawEntry{u.cluster + v.cluster, u.location, colocate(u.target, v.target),
                                  u.multiplicity * v.multiplicity});
        }
      }
      acc = std::move(next);
      left = SpeciesTerm::parallel({left, right});
    }
    return acc;
  }

  const Definitions& defs_;
  int depth_limit_;
};

}  // namespace

std::string TransitionEntry::to_string() const {
  return source.key + "  --[" + cluster.to_string() + "]@" + location.to_string() + "-->  " + target.key +
         "  x" + std::to_string(multiplicity);
}

Abstraction colocate(const Abstraction& f, const Abstraction& g) {
  std::size_t n = std::max(f.bound.size(), g.bound.size());
  if (n == 0) return Abstraction{{}, SpeciesTerm::parallel({f.body, g.body})};
  NameSet avoid = names_of(f);
  NameSet gn = names_of(g);
  avoid.insert(gn.begin(), gn.end());
  std::vector<std::string> shared;
  for (std::size_t i = 0; i < n; ++i) {
    shared.push_back(fresh_name("m" + std::to_string(i), avoid));
    avoid.insert(shared.back());
  }
  auto align = [&](const Abstraction& a) {
    Renaming r;
    for (std::size_t i = 0; i < a.bound.size(); ++i) r[a.bound[i]] = shared[i];
    return rename_locations(a.body, r);
  };
  return Abstraction{shared, SpeciesTerm::parallel({align(f), align(g)})};
}

Abstraction restrict_abstraction(const std::vector<std::string>& names, const Abstraction& f) {
  if (names.empty()) return f;
  NameSet avoid = names_of(f);
  avoid.insert(names.begin(), names.end());
  Renaming r;
  std::vector<std::string> bound = f.bound;
  for (auto& m : bound) {
    if (std::find(names.begin(), names.end(), m) == names.end()) continue;
    std::string fresh = fresh_name(m, avoid);
    avoid.insert(fresh);
    r[m] = fresh;
    m = fresh;
  }
  SpeciesTerm body = r.empty() ? f.body : rename_locations(f.body, r);
  return Abstraction{std::move(bound), SpeciesTerm::restriction(names, std::move(body))};
}

CanonicalSpecies commit(const Abstraction& f, const Definitions& defs) {
  return normalize(SpeciesTerm::restriction(f.bound, f.body), defs);
}

std::vector<TransitionEntry> transitions(const SpeciesTerm& term, const Definitions& defs, int depth_limit) {
  CanonicalSpecies source = normalize(term, defs);
  std::vector<RawEntry> raw = Deriver(defs, depth_limit).derive(term, 0);

  using Key = std::tuple<Location, Cluster, std::string>;
  std::map<Key, TransitionEntry> merged;
  for (auto& e : raw) {
    CanonicalAbstraction target = normalize(e.target, defs);
    Key key{e.location, e.cluster, target.key};
    auto it = merged.find(key);
    if (it == merged.end()) {
      merged.emplace(key, TransitionEntry{source, e.cluster, e.location, std::move(target), e.multiplicity});
    } else {
      it->second.multiplicity += e.multiplicity;
    }
  }
  std::vector<TransitionEntry> out;
  out.reserve(merged.size());
  for (auto& [key, entry] : merged) out.push_back(std::move(entry));
  return out;
}

std::shared_ptr<const std::vector<TransitionEntry>> TransitionCache::get(const CanonicalSpecies& species) {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(species.key);
    if (it != cache_.end()) return it->second;
  }
  auto computed = std::make_shared<const std::vector<TransitionEntry>>(
      transitions(species.term, defs_, depth_limit_));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.emplace(species.key, std::move(computed));
  return it->second;
}

}  // namespace bond
