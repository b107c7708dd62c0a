#ifndef BOND_JSON_HPP
#define BOND_JSON_HPP

#include <string>

#include "bond/expr.hpp"
#include "bond/reactions.hpp"

namespace bond {

/// Reaction network as JSON: `primes`, `params` and `reactions`, each rate
/// an expression tree of `const`, `var`, `add`, `sub`, `mul` and `div` nodes.
std::string crn_json(const ReactionSystem& rs);

/// A single expression tree. Variables carry `type` (param, species, arg,
/// law_param), `index` and `name`; species names are the given labels.
std::string expr_json(const Expr& e, const std::vector<std::string>& species_labels);

}  // namespace bond

#endif  // BOND_JSON_HPP
