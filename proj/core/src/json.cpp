#include "bond/json.hpp"

#include "json_tree.hpp"

namespace bond {

std::string expr_json(const Expr& e, const std::vector<std::string>& species_labels) {
  return detail::expr_tree(e, species_labels).dump();
}

std::string crn_json(const ReactionSystem& rs) {
  using nlohmann::ordered_json;
  ordered_json doc;
  ordered_json primes = ordered_json::array();
  for (std::size_t i = 0; i < rs.index.size(); ++i) {
    primes.push_back({{"index", i}, {"key", rs.index[i].key}, {"label", rs.labels[i]}, {"initial", rs.initial[i]}});
  }
  ordered_json params = ordered_json::array();
  for (std::size_t i = 0; i < rs.param_names.size(); ++i) {
    params.push_back({{"name", rs.param_names[i]}, {"value", rs.param_values[i]}});
  }
  ordered_json reactions = ordered_json::array();
  for (const auto& r : rs.reactions) {
    ordered_json entries = ordered_json::array();
    for (auto f : r.fluxes) entries.push_back(rs.matches[rs.fluxes[f].match].entry);
    reactions.push_back({{"reactants", r.reactants},
                         {"products", r.products},
                         {"rate", detail::expr_tree(r.rate, rs.labels)},
                         {"affinity_entries", entries}});
  }
  doc["primes"] = std::move(primes);
  doc["params"] = std::move(params);
  doc["reactions"] = std::move(reactions);
  return doc.dump(2) + "\n";
}

}  // namespace bond
