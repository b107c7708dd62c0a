#ifndef BOND_CONGRUENCE_HPP
#define BOND_CONGRUENCE_HPP

#include <map>
#include <string>
#include <vector>

#include "bond/model.hpp"
#include "bond/terms.hpp"

namespace bond {

/// A species in normal form together with its serialization, which is the
/// total-order key used for identity everywhere downstream.
struct CanonicalSpecies {
  SpeciesTerm term;
  std::string key;

  friend bool operator==(const CanonicalSpecies& a, const CanonicalSpecies& b) { return a.key == b.key; }
  friend auto operator<=>(const CanonicalSpecies& a, const CanonicalSpecies& b) { return a.key <=> b.key; }
};

/// Normal form modulo structural congruence: parallel and choice are
/// flattened and sorted, Nil is dropped, restrictions are split to their
/// connected scope and unused binders vanish, bound names are renumbered
/// `l<i>` canonically. Invocations whose definition is a choice of guards stay
/// as opaque names; any other invocation is replaced by its definition.
CanonicalSpecies normalize(const SpeciesTerm& term, const Definitions& defs);

/// Canonical form of an abstraction: bound names positional, body normalized.
struct CanonicalAbstraction {
  Abstraction abstraction;
  std::string key;
};
CanonicalAbstraction normalize(const Abstraction& abstraction, const Definitions& defs);

/// The sorted bag of prime factors of `term`.
std::vector<CanonicalSpecies> primes(const SpeciesTerm& term, const Definitions& defs);

/// Splits an already-normalized species into its prime factors.
std::vector<CanonicalSpecies> prime_factors(const CanonicalSpecies& species);

/// Sparse map from canonical prime to concentration; zero entries are erased.
class Mixture {
 public:
  struct Entry {
    CanonicalSpecies species;
    double amount = 0.0;
  };

  void add(const CanonicalSpecies& prime, double amount);
  double get(const std::string& key) const;
  const std::map<std::string, Entry>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, Entry> entries_;
};

/// Unit-concentration embedding: each prime factor counted with multiplicity.
Mixture embed(const SpeciesTerm& term, const Definitions& defs);

/// Next free index for canonical binder names `l<i>` given the free names.
std::size_t binder_base(const NameSet& free);

}  // namespace bond

#endif  // BOND_CONGRUENCE_HPP
