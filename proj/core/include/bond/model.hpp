#ifndef BOND_MODEL_HPP
#define BOND_MODEL_HPP

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "bond/error.hpp"
#include "bond/expr.hpp"
#include "bond/terms.hpp"

namespace bond {

/// `species NAME(formals) = body;`
struct SpeciesDef {
  std::string name;
  std::vector<std::string> formals;
  SpeciesTerm body;
  SourceSpan span;
};

/// Species definitions by name, kept in declaration order.
class Definitions {
 public:
  void add(SpeciesDef def);

  const SpeciesDef* find(const std::string& name) const;
  const std::vector<SpeciesDef>& ordered() const { return defs_; }
  bool empty() const { return defs_.empty(); }

  /// The definition body with formals replaced by `args` (capture-avoiding).
  SpeciesTerm instantiate(const SpeciesDef& def, const std::vector<std::string>& args) const;

 private:
  std::vector<SpeciesDef> defs_;
  std::map<std::string, std::size_t> index_;
};

/// A named rate function of per-cluster concentrations. The body uses
/// `VarKind::LawParam` leaves for formal parameters and `VarKind::Arg` leaves
/// for site arguments.
struct KineticLaw {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> args;
  Expr body;
  bool variadic = false;
  std::string source;  ///< body text as written, when parsed
  SourceSpan span;

  /// Body for an application with `arity` site arguments.
  Expr body_for(std::size_t arity) const;

  /// The builtin mass-action law `MA(k)`: k*x1*...*xn for any n.
  static KineticLaw mass_action();
};

/// A kinetic-law argument: a literal number or a reference to a `param`.
using LawArg = std::variant<double, std::string>;

/// `pattern at Law(args);`
struct AffinityEntry {
  Pattern pattern;
  std::string law;
  std::vector<LawArg> args;
  SourceSpan span;
};

struct Parameter {
  std::string name;
  double value = 0.0;
  SourceSpan span;
};

/// `NUM NAME` inside `mixture { ... }`.
struct MixtureItem {
  double concentration = 0.0;
  std::string species;
  SourceSpan span;
};

struct Model {
  std::vector<Parameter> params;
  Definitions species;
  std::vector<KineticLaw> laws;  ///< user-defined laws; MA is implicit
  std::vector<AffinityEntry> affinity;
  std::vector<MixtureItem> mixture;
  std::vector<std::string> warnings;

  /// User law or the builtin MA; nullptr when unknown.
  const KineticLaw* find_law(const std::string& name) const;
  std::optional<std::size_t> param_index(const std::string& name) const;
  std::vector<double> param_values() const;

  /// Overrides a parameter value; throws BondError(Domain) if unknown.
  void set_param(const std::string& name, double value);
};

/// Structural equality; spans, warnings and law source text are ignored and
/// law bodies compare after flattening.
bool structurally_equal(const Model& a, const Model& b);

}  // namespace bond

#endif  // BOND_MODEL_HPP
