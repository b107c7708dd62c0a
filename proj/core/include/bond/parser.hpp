#ifndef BOND_PARSER_HPP
#define BOND_PARSER_HPP

#include <string>
#include <string_view>

#include "bond/model.hpp"

namespace bond {

/// Parses and validates a `.bond` model. Throws ParseError (code Parse or
/// Arity) with a span inside `text` on the first problem found.
///
///   model      := item*
///   item       := param | species | law | affinity | mixture
///   param      := "param" NAME "=" ["-"] NUM ";"
///   species    := "species" NAME ["(" LOC {"," LOC} ")"] "=" body ";"
///   body       := unary {"+" unary}          -- every summand a guard
///   unary      := guard | atom
///   guard      := SITE ["@" LOC] ["(" LOC {"," LOC} ")"] "." unary
///   atom       := "0" | NAME ["(" LOC {"," LOC} ")"]
///               | "(" body {"|" body} ")" | "new" LOC {"," LOC} "in" unary
///   law        := "law" NAME "(" [NAME {"," NAME}] ";" NAME {"," NAME} ")" "=" expr ";"
///   affinity   := "affinity" "{" {pattern "at" NAME "(" [arg {"," arg}] ")" ";"} "}"
///   arg        := NUM | NAME                -- NAME refers to a param
///   pattern    := cluster {"||" cluster} ;  cluster := SITE {"&" SITE}
///   mixture    := "mixture" "{" NUM NAME {"," NUM NAME} "}"
///
/// `#` starts a line comment.
Model parse_model(std::string_view text);

/// Renders a model back to `.bond` text; parse_model(render_model(m)) is
/// structurally equal to m.
std::string render_model(const Model& model);

/// Parses a standalone species body (the `body` production) without
/// resolving invocations. Intended for tests and tools.
SpeciesTerm parse_species(std::string_view text);

/// "line:col: message" for a parse error in `text`.
std::string describe(const ParseError& error);

}  // namespace bond

#endif  // BOND_PARSER_HPP
