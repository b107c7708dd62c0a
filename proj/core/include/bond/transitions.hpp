#ifndef BOND_TRANSITIONS_HPP
#define BOND_TRANSITIONS_HPP

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <vector>

#include "bond/congruence.hpp"
#include "bond/model.hpp"
#include "bond/terms.hpp"

namespace bond {

/// One multi-transition: `source --[cluster]@location--> target`, counted
/// `multiplicity` times.
struct TransitionEntry {
  CanonicalSpecies source;
  Cluster cluster;
  Location location;
  CanonicalAbstraction target;
  std::size_t multiplicity = 1;

  /// `SOURCE  --[CLUSTER]@LOC-->  (BINDERS)BODY  xMULT`
  std::string to_string() const;
};

constexpr int kDefaultUnfoldLimit = 64;

/// All transitions of `term`, deduplicated by (cluster, location, target)
/// with summed multiplicity and sorted deterministically. Throws
/// BondError(Unbounded) when unfolding invocations exceeds `depth_limit`.
std::vector<TransitionEntry> transitions(const SpeciesTerm& term, const Definitions& defs,
                                         int depth_limit = kDefaultUnfoldLimit);

/// `(l1..lp)A || (l1..lq)B = (l1..lmax)(A | B)` with positional sharing.
Abstraction colocate(const Abstraction& f, const Abstraction& g);

/// `new names in (m..)A = (m..)(new names in A)`, renaming colliding binders.
Abstraction restrict_abstraction(const std::vector<std::string>& names, const Abstraction& f);

/// The committed product `new l1..ln in A` in normal form.
CanonicalSpecies commit(const Abstraction& f, const Definitions& defs);

/// Memoized transitions per canonical species. Lookups take a shared lock;
/// a miss computes outside the lock and inserts under an exclusive one.
class TransitionCache {
 public:
  explicit TransitionCache(const Definitions& defs, int depth_limit = kDefaultUnfoldLimit)
      : defs_(defs), depth_limit_(depth_limit) {}

  std::shared_ptr<const std::vector<TransitionEntry>> get(const CanonicalSpecies& species);

 private:
  const Definitions& defs_;
  int depth_limit_;
  std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const std::vector<TransitionEntry>>> cache_;
};

}  // namespace bond

#endif  // BOND_TRANSITIONS_HPP
