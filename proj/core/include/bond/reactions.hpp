#ifndef BOND_REACTIONS_HPP
#define BOND_REACTIONS_HPP

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "bond/congruence.hpp"
#include "bond/expr.hpp"
#include "bond/model.hpp"
#include "bond/transitions.hpp"

namespace bond {

/// Reachable primes in discovery order with lookup by serialization.
class PrimeIndex {
 public:
  /// Index of `prime`, inserting it if new.
  std::size_t add(const CanonicalSpecies& prime);
  std::optional<std::size_t> find(const std::string& key) const;

  const CanonicalSpecies& operator[](std::size_t i) const { return primes_[i]; }
  const std::vector<CanonicalSpecies>& primes() const { return primes_; }
  std::size_t size() const { return primes_.size(); }

 private:
  std::vector<CanonicalSpecies> primes_;
  std::map<std::string, std::size_t> lookup_;
};

constexpr std::size_t kDefaultPrimeCap = 256;

/// Least set of primes closed under the model's reactions, starting from the
/// initial mixture. Throws BondError(Unbounded) once more than `cap` primes
/// are found.
PrimeIndex reachable_primes(const Model& model, std::size_t cap = kDefaultPrimeCap);

/// `sum mu * x_P` over the primes offering an ambient transition on a cluster.
struct LinearForm {
  std::vector<std::pair<std::size_t, std::size_t>> terms;  ///< (prime, multiplicity)

  Expr to_expr(const PrimeIndex& index) const;
};

/// Per-cluster concentrations for every ambient cluster of the index.
std::map<Cluster, LinearForm> cluster_concentrations(const PrimeIndex& index, const Definitions& defs);

/// How a pattern slot's per-molecule factor `mu*x/a` is represented.
enum class SlotMode {
  Cancelled,  ///< the slot has a single match, so the factor is 1
  Divided,    ///< the law is divisible by the slot argument: mu*x times law/arg
  Quotient,   ///< residual guarded quotient mu*x/a, 0 when a is 0
};

struct SlotOption {
  std::size_t prime = 0;
  std::size_t multiplicity = 1;
  Abstraction target;
};

struct Slot {
  Cluster cluster;
  SlotMode mode = SlotMode::Cancelled;
  std::vector<SlotOption> options;
  Expr concentration;  ///< a_j as an expression over prime variables
};

/// An affinity entry after matching against the prime index.
struct EntryMatch {
  std::size_t entry = 0;
  std::vector<Slot> slots;
  double symmetry = 1.0;  ///< 1 / prod over distinct clusters of multiplicity!
  Expr law;               ///< law with arguments substituted and Divided slots removed
};

constexpr std::size_t kAnyOption = std::numeric_limits<std::size_t>::max();

/// One matched slot tuple of one entry: `choices[j]` indexes slots[j].options,
/// or is kAnyOption when the slot has been summed over.
struct Flux {
  std::size_t match = 0;
  std::vector<std::size_t> choices;
  std::size_t reaction = 0;
};

struct Reaction {
  std::vector<std::size_t> reactants;  ///< sorted bag of prime indices
  std::vector<std::size_t> products;   ///< sorted bag of prime indices
  Expr rate;
  std::vector<std::size_t> fluxes;  ///< provenance, indices into ReactionSystem::fluxes

  /// Net change per prime (products minus reactants), sparse and sorted.
  std::vector<std::pair<std::size_t, int>> net() const;
};

struct ReactionSystem {
  PrimeIndex index;
  std::vector<std::string> param_names;
  std::vector<double> param_values;
  std::vector<std::string> labels;  ///< display name per prime
  std::vector<double> initial;      ///< initial concentration per prime
  std::vector<EntryMatch> matches;
  std::vector<Flux> fluxes;
  std::vector<Reaction> reactions;
  std::vector<std::string> warnings;

  /// Rate expression of a single flux (wildcard slots contribute 1).
  Expr flux_rate(const Flux& flux) const;

  /// Display name of prime `i`: the first parameterless definition that
  /// normalizes to it, else its serialization.
  const std::string& species_label(std::size_t i) const { return labels[i]; }
};

/// Slot-wise reaction extraction over a complete prime index.
ReactionSystem extract_reactions(const Model& model, const PrimeIndex& index);

/// reachable_primes followed by extract_reactions.
ReactionSystem compile(const Model& model, std::size_t cap = kDefaultPrimeCap);

/// The committed product of the colocated slot targets, as prime factors.
std::vector<CanonicalSpecies> product_of(const std::vector<const Abstraction*>& targets, const Definitions& defs);

}  // namespace bond

#endif  // BOND_REACTIONS_HPP
