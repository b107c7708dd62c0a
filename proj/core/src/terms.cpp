#include "bond/terms.hpp"

#include <algorithm>
#include <stdexcept>

namespace bond {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string join(const std::vector<std::string>& names, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += sep;
    out += names[i];
  }
  return out;
}

void collect_free(const SpeciesTerm& term, NameSet& out) {
  std::visit(Overloaded{
                 [](const NilTerm&) {},
                 [&](const SumTerm& sum) {
                   for (const PrefixGuard& g : sum.guards) {
                     if (!g.location.is_ambient()) out.insert(g.location.name());
                     NameSet inner;
                     collect_free(g.continuation, inner);
                     for (const auto& r : g.received) inner.erase(r);
                     out.insert(inner.begin(), inner.end());
                   }
                 },
                 [&](const ParallelTerm& par) {
                   for (const auto& p : par.parts) collect_free(p, out);
                 },
                 [&](const RestrictionTerm& res) {
                   NameSet inner;
                   collect_free(res.body, inner);
                   for (const auto& b : res.bound) inner.erase(b);
                   out.insert(inner.begin(), inner.end());
                 },
                 [&](const InvokeTerm& inv) { out.insert(inv.args.begin(), inv.args.end()); },
             },
             term.node().value);
}

void collect_all(const SpeciesTerm& term, NameSet& out) {
  std::visit(Overloaded{
                 [](const NilTerm&) {},
                 [&](const SumTerm& sum) {
                   for (const PrefixGuard& g : sum.guards) {
                     if (!g.location.is_ambient()) out.insert(g.location.name());
                     out.insert(g.received.begin(), g.received.end());
                     collect_all(g.continuation, out);
                   }
                 },
                 [&](const ParallelTerm& par) {
                   for (const auto& p : par.parts) collect_all(p, out);
                 },
                 [&](const RestrictionTerm& res) {
                   out.insert(res.bound.begin(), res.bound.end());
                   collect_all(res.body, out);
                 },
                 [&](const InvokeTerm& inv) { out.insert(inv.args.begin(), inv.args.end()); },
             },
             term.node().value);
}

std::string map_name(const Renaming& renaming, const std::string& name) {
  auto it = renaming.find(name);
  return it == renaming.end() ? name : it->second;
}

// Renames under a binder list: removes the binders from the map and freshens
// any binder that would capture an image of a name free in `body`.
std::vector<std::string> rebind(const std::vector<std::string>& binders,
                                const SpeciesTerm& body, const Renaming& renaming,
                                Renaming& inner) {
  inner = renaming;
  for (const auto& b : binders) inner.erase(b);

  NameSet body_free = free_locations(body);
  NameSet images;
  for (const auto& name : body_free) {
    if (std::find(binders.begin(), binders.end(), name) != binders.end()) continue;
    images.insert(map_name(inner, name));
  }

  NameSet avoid = images;
  avoid.insert(body_free.begin(), body_free.end());
  avoid.insert(binders.begin(), binders.end());
  std::vector<std::string> result;
  result.reserve(binders.size());
  for (const auto& b : binders) {
    if (images.count(b)) {
      std::string fresh = fresh_name(b, avoid);
      avoid.insert(fresh);
      inner[b] = fresh;
      result.push_back(fresh);
    } else {
      result.push_back(b);
    }
  }
  return result;
}

std::string print_unary(const SpeciesTerm& term);

std::string print_guard(const PrefixGuard& g) {
  std::string out = g.site.name;
  if (!g.location.is_ambient()) out += "@" + g.location.name();
  if (!g.received.empty()) out += "(" + join(g.received, ", ") + ")";
  out += ".";
  out += print_unary(g.continuation);
  return out;
}

std::string print(const SpeciesTerm& term) {
  return std::visit(
      Overloaded{
          [](const NilTerm&) -> std::string { return "0"; },
          [](const SumTerm& sum) {
            std::string out;
            for (std::size_t i = 0; i < sum.guards.size(); ++i) {
              if (i) out += " + ";
              out += print_guard(sum.guards[i]);
            }
            return out;
          },
          [](const ParallelTerm& par) {
            std::string out = "(";
            for (std::size_t i = 0; i < par.parts.size(); ++i) {
              if (i) out += " | ";
              out += print(par.parts[i]);
            }
            return out + ")";
          },
          [](const RestrictionTerm& res) {
            return "new " + join(res.bound, ", ") + " in " + print_unary(res.body);
          },
          [](const InvokeTerm& inv) {
            if (inv.args.empty()) return inv.name;
            return inv.name + "(" + join(inv.args, ", ") + ")";
          },
      },
      term.node().value);
}

std::string print_unary(const SpeciesTerm& term) {
  if (const auto* sum = term.as<SumTerm>(); sum && sum->guards.size() > 1) {
    return "(" + print(term) + ")";
  }
  return print(term);
}

}  // namespace

Location Location::named(std::string name) {
  if (name.empty()) throw std::invalid_argument("named location needs a name");
  Location loc;
  loc.name_ = std::move(name);
  return loc;
}

std::string Location::to_string() const { return is_ambient() ? "⊤" : name_; }

SpeciesTerm::SpeciesTerm() {
  static const auto kNil = std::make_shared<const TermNode>(TermNode{NilTerm{}});
  node_ = kNil;
}

SpeciesTerm SpeciesTerm::sum(std::vector<PrefixGuard> guards) {
  if (guards.empty()) return nil();
  return SpeciesTerm(std::make_shared<const TermNode>(TermNode{SumTerm{std::move(guards)}}));
}

SpeciesTerm SpeciesTerm::prefix(Site site, Location location, std::vector<std::string> received,
                                SpeciesTerm continuation) {
  std::vector<PrefixGuard> guards;
  guards.push_back(PrefixGuard{std::move(site), std::move(location), std::move(received),
                               std::move(continuation)});
  return sum(std::move(guards));
}

SpeciesTerm SpeciesTerm::parallel(std::vector<SpeciesTerm> parts) {
  if (parts.empty()) return nil();
  if (parts.size() == 1) return parts.front();
  return SpeciesTerm(
      std::make_shared<const TermNode>(TermNode{ParallelTerm{std::move(parts)}}));
}

SpeciesTerm SpeciesTerm::restriction(std::vector<std::string> bound, SpeciesTerm body) {
  if (bound.empty()) return body;
  return SpeciesTerm(std::make_shared<const TermNode>(
      TermNode{RestrictionTerm{std::move(bound), std::move(body)}}));
}

SpeciesTerm SpeciesTerm::invoke(std::string name, std::vector<std::string> args) {
  return SpeciesTerm(std::make_shared<const TermNode>(
      TermNode{InvokeTerm{std::move(name), std::move(args)}}));
}

bool SpeciesTerm::is_nil() const { return std::holds_alternative<NilTerm>(node_->value); }

bool operator==(const SpeciesTerm& a, const SpeciesTerm& b) {
  if (a.node_ == b.node_) return true;
  return a.node_->value == b.node_->value;
}

Cluster::Cluster(std::vector<Site> sites) : sites_(std::move(sites)) {
  std::sort(sites_.begin(), sites_.end());
}

Cluster Cluster::operator+(const Cluster& other) const {
  std::vector<Site> merged = sites_;
  merged.insert(merged.end(), other.sites_.begin(), other.sites_.end());
  return Cluster(std::move(merged));
}

std::string Cluster::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    if (i) out += "&";
    out += sites_[i].name;
  }
  return out;
}

std::vector<Cluster> Pattern::sorted() const {
  std::vector<Cluster> out = clusters;
  std::sort(out.begin(), out.end());
  return out;
}

std::string Pattern::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < clusters.size(); ++i) {
    if (i) out += " || ";
    out += clusters[i].to_string();
  }
  return out;
}

NameSet free_locations(const SpeciesTerm& term) {
  NameSet out;
  collect_free(term, out);
  return out;
}

NameSet free_locations(const Abstraction& abstraction) {
  NameSet out = free_locations(abstraction.body);
  for (const auto& b : abstraction.bound) out.erase(b);
  return out;
}

NameSet all_locations(const SpeciesTerm& term) {
  NameSet out;
  collect_all(term, out);
  return out;
}

std::string fresh_name(const std::string& base, const NameSet& avoid) {
  std::string candidate = base;
  while (avoid.count(candidate)) candidate += '\'';
  return candidate;
}

SpeciesTerm rename_locations(const SpeciesTerm& term, const Renaming& renaming) {
  if (renaming.empty()) return term;
  return std::visit(
      Overloaded{
          [&](const NilTerm&) { return term; },
          [&](const SumTerm& sum) {
            std::vector<PrefixGuard> guards;
            guards.reserve(sum.guards.size());
            for (const PrefixGuard& g : sum.guards) {
              Location loc = g.location.is_ambient()
                                 ? g.location
                                 : Location::named(map_name(renaming, g.location.name()));
              Renaming inner;
              std::vector<std::string> received = rebind(g.received, g.continuation, renaming, inner);
              guards.push_back(PrefixGuard{g.site, std::move(loc), std::move(received),
                                           rename_locations(g.continuation, inner)});
            }
            return SpeciesTerm::sum(std::move(guards));
          },
          [&](const ParallelTerm& par) {
            std::vector<SpeciesTerm> parts;
            parts.reserve(par.parts.size());
            for (const auto& p : par.parts) parts.push_back(rename_locations(p, renaming));
            return SpeciesTerm::parallel(std::move(parts));
          },
          [&](const RestrictionTerm& res) {
            Renaming inner;
            std::vector<std::string> bound = rebind(res.bound, res.body, renaming, inner);
            return SpeciesTerm::restriction(std::move(bound), rename_locations(res.body, inner));
          },
          [&](const InvokeTerm& inv) {
            std::vector<std::string> args;
            args.reserve(inv.args.size());
            for (const auto& a : inv.args) args.push_back(map_name(renaming, a));
            return SpeciesTerm::invoke(inv.name, std::move(args));
          },
      },
      term.node().value);
}

std::string to_string(const SpeciesTerm& term) { return print(term); }

std::string to_string(const Abstraction& abstraction) {
  return "(" + join(abstraction.bound, ", ") + ")" + print_unary(abstraction.body);
}

}  // namespace bond
