#ifndef BOND_TERMS_HPP
#define BOND_TERMS_HPP

#include <compare>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace bond {

/// A reaction capability of a species, e.g. `s`, `bindTC`.
struct Site {
  std::string name;

  auto operator<=>(const Site&) const = default;
};

/// Either the ambient location (mixture level) or a named internal location
/// of a molecule. The ambient location can never be bound.
class Location {
 public:
  Location() = default;

  static Location ambient() { return Location(); }
  static Location named(std::string name);

  bool is_ambient() const { return name_.empty(); }
  const std::string& name() const { return name_; }

  /// `⊤` for ambient, the bare name otherwise.
  std::string to_string() const;

  auto operator<=>(const Location&) const = default;

 private:
  std::string name_;
};

using NameSet = std::set<std::string>;
using Renaming = std::map<std::string, std::string>;

struct TermNode;
struct PrefixGuard;

/// Immutable, shareable syntax tree of a species. Copies are cheap.
class SpeciesTerm {
 public:
  /// Nil.
  SpeciesTerm();

  static SpeciesTerm nil() { return SpeciesTerm(); }
  /// Choice between guards; zero guards collapses to Nil.
  static SpeciesTerm sum(std::vector<PrefixGuard> guards);
  /// `site@location(received).continuation` as a one-guard sum.
  static SpeciesTerm prefix(Site site, Location location,
                            std::vector<std::string> received,
                            SpeciesTerm continuation);
  /// Parallel composition as written; zero parts is Nil, one part is itself.
  static SpeciesTerm parallel(std::vector<SpeciesTerm> parts);
  static SpeciesTerm restriction(std::vector<std::string> bound, SpeciesTerm body);
  static SpeciesTerm invoke(std::string name, std::vector<std::string> args = {});

  const TermNode& node() const { return *node_; }

  bool is_nil() const;
  template <class T>
  const T* as() const;

  friend bool operator==(const SpeciesTerm& a, const SpeciesTerm& b);

 private:
  explicit SpeciesTerm(std::shared_ptr<const TermNode> node) : node_(std::move(node)) {}

  std::shared_ptr<const TermNode> node_;
};

/// `site@location(received...).continuation`. Received names bind in the
/// continuation only and are pairwise distinct.
struct PrefixGuard {
  Site site;
  Location location;
  std::vector<std::string> received;
  SpeciesTerm continuation;

  friend bool operator==(const PrefixGuard&, const PrefixGuard&) = default;
};

struct NilTerm {
  friend bool operator==(const NilTerm&, const NilTerm&) = default;
};
struct SumTerm {
  std::vector<PrefixGuard> guards;
  friend bool operator==(const SumTerm&, const SumTerm&) = default;
};
struct ParallelTerm {
  std::vector<SpeciesTerm> parts;
  friend bool operator==(const ParallelTerm&, const ParallelTerm&) = default;
};
struct RestrictionTerm {
  std::vector<std::string> bound;
  SpeciesTerm body;
  friend bool operator==(const RestrictionTerm&, const RestrictionTerm&) = default;
};
struct InvokeTerm {
  std::string name;
  std::vector<std::string> args;
  friend bool operator==(const InvokeTerm&, const InvokeTerm&) = default;
};

struct TermNode {
  std::variant<NilTerm, SumTerm, ParallelTerm, RestrictionTerm, InvokeTerm> value;
};

template <class T>
const T* SpeciesTerm::as() const {
  return std::get_if<T>(&node_->value);
}

/// Species with an ordered list of not-yet-created locations, `(l1,...,ln)A`.
struct Abstraction {
  std::vector<std::string> bound;
  SpeciesTerm body;

  friend bool operator==(const Abstraction&, const Abstraction&) = default;
};

/// A bag of sites, kept sorted.
class Cluster {
 public:
  Cluster() = default;
  explicit Cluster(std::vector<Site> sites);

  const std::vector<Site>& sites() const { return sites_; }
  std::size_t size() const { return sites_.size(); }

  /// Bag union.
  Cluster operator+(const Cluster& other) const;

  /// Sites joined with `&`, e.g. `unbindTC&unbindEC`.
  std::string to_string() const;

  auto operator<=>(const Cluster&) const = default;

 private:
  std::vector<Site> sites_;
};

/// A bag of clusters. The written order is kept because kinetic-law arguments
/// are positional; matching compares the sorted bag.
struct Pattern {
  std::vector<Cluster> clusters;

  std::vector<Cluster> sorted() const;
  std::string to_string() const;

  friend bool operator==(const Pattern&, const Pattern&) = default;
};

/// Named locations occurring outside any binder for them.
NameSet free_locations(const SpeciesTerm& term);
NameSet free_locations(const Abstraction& abstraction);

/// Every location name occurring in the term, bound or free.
NameSet all_locations(const SpeciesTerm& term);

/// Capture-avoiding renaming of free locations. Binders that would capture an
/// image of the map are freshened with `'` suffixes.
SpeciesTerm rename_locations(const SpeciesTerm& term, const Renaming& renaming);

/// `base`, `base'`, `base''`, ... whichever is first absent from `avoid`.
std::string fresh_name(const std::string& base, const NameSet& avoid);

/// Concrete `.bond` syntax. Deterministic, and re-parseable as a species body.
std::string to_string(const SpeciesTerm& term);
std::string to_string(const Abstraction& abstraction);

}  // namespace bond

#endif  // BOND_TERMS_HPP
