#include "bond/model.hpp"

#include <stdexcept>

namespace bond {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Parse: return "PARSE";
    case ErrorCode::Arity: return "ARITY";
    case ErrorCode::Unbounded: return "UNBOUNDED";
    case ErrorCode::Stiff: return "STIFF";
    case ErrorCode::Domain: return "DOMAIN";
  }
  return "UNKNOWN";
}

void Definitions::add(SpeciesDef def) {
  if (index_.count(def.name)) throw std::invalid_argument("duplicate species '" + def.name + "'");
  index_.emplace(def.name, defs_.size());
  defs_.push_back(std::move(def));
}

const SpeciesDef* Definitions::find(const std::string& name) const {
  auto it = index_.find(name);
  return it == index_.end() ? nullptr : &defs_[it->second];
}

SpeciesTerm Definitions::instantiate(const SpeciesDef& def,
                                     const std::vector<std::string>& args) const {
  if (args.size() != def.formals.size()) {
    throw BondError(ErrorCode::Arity, "species '" + def.name + "' expects " +
                                          std::to_string(def.formals.size()) +
                                          " location arguments, got " +
                                          std::to_string(args.size()));
  }
  Renaming renaming;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (def.formals[i] != args[i]) renaming[def.formals[i]] = args[i];
  }
  return rename_locations(def.body, renaming);
}

Expr KineticLaw::body_for(std::size_t arity) const {
  if (!variadic) return body;
  std::vector<Expr> factors;
  factors.push_back(Expr::var(VarKind::LawParam, 0, params.at(0)));
  for (std::size_t i = 0; i < arity; ++i) {
    factors.push_back(Expr::var(VarKind::Arg, i, "x" + std::to_string(i + 1)));
  }
  return Expr::mul(std::move(factors));
}

KineticLaw KineticLaw::mass_action() {
  KineticLaw law;
  law.name = "MA";
  law.params = {"k"};
  law.variadic = true;
  law.body = Expr::var(VarKind::LawParam, 0, "k");
  return law;
}

const KineticLaw* Model::find_law(const std::string& name) const {
  static const KineticLaw kMassAction = KineticLaw::mass_action();
  if (name == kMassAction.name) return &kMassAction;
  for (const auto& law : laws) {
    if (law.name == name) return &law;
  }
  return nullptr;
}

std::optional<std::size_t> Model::param_index(const std::string& name) const {
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (params[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<double> Model::param_values() const {
  std::vector<double> out;
  out.reserve(params.size());
  for (const auto& p : params) out.push_back(p.value);
  return out;
}

void Model::set_param(const std::string& name, double value) {
  auto idx = param_index(name);
  if (!idx) throw BondError(ErrorCode::Domain, "unknown parameter '" + name + "'");
  params[*idx].value = value;
}

bool structurally_equal(const Model& a, const Model& b) {
  if (a.params.size() != b.params.size()) return false;
  for (std::size_t i = 0; i < a.params.size(); ++i) {
    if (a.params[i].name != b.params[i].name || a.params[i].value != b.params[i].value) return false;
  }
  const auto& da = a.species.ordered();
  const auto& db = b.species.ordered();
  if (da.size() != db.size()) return false;
  for (std::size_t i = 0; i < da.size(); ++i) {
    if (da[i].name != db[i].name || da[i].formals != db[i].formals || !(da[i].body == db[i].body)) {
      return false;
    }
  }
  if (a.laws.size() != b.laws.size()) return false;
  for (std::size_t i = 0; i < a.laws.size(); ++i) {
    const auto& la = a.laws[i];
    const auto& lb = b.laws[i];
    if (la.name != lb.name || la.params != lb.params || la.args != lb.args ||
        la.variadic != lb.variadic ||
        structural_key(simplify(la.body)) != structural_key(simplify(lb.body))) {
      return false;
    }
  }
  if (a.affinity.size() != b.affinity.size()) return false;
  for (std::size_t i = 0; i < a.affinity.size(); ++i) {
    const auto& ea = a.affinity[i];
    const auto& eb = b.affinity[i];
    if (!(ea.pattern == eb.pattern) || ea.law != eb.law || ea.args != eb.args) return false;
  }
  if (a.mixture.size() != b.mixture.size()) return false;
  for (std::size_t i = 0; i < a.mixture.size(); ++i) {
    if (a.mixture[i].concentration != b.mixture[i].concentration ||
        a.mixture[i].species != b.mixture[i].species) {
      return false;
    }
  }
  return true;
}

}  // namespace bond
