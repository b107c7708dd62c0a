#ifndef BOND_SRC_JSON_TREE_HPP
#define BOND_SRC_JSON_TREE_HPP

#include <string>
#include <vector>

#include "bond/expr.hpp"
#include "json.hpp"

namespace bond::detail {

inline nlohmann::ordered_json expr_tree(const Expr& e, const std::vector<std::string>& labels) {
  using nlohmann::ordered_json;
  ordered_json node;
  switch (e.kind()) {
    case Expr::Kind::Const:
      node["kind"] = "const";
      node["value"] = e.value();
      return node;
    case Expr::Kind::Var: {
      static const char* types[] = {"param", "arg", "law_param", "species"};
      node["kind"] = "var";
      node["type"] = types[static_cast<int>(e.var_kind())];
      node["index"] = e.var_index();
      node["name"] = e.var_kind() == VarKind::Species && e.var_index() < labels.size() ? labels[e.var_index()]
                                                                                        : e.var_name();
      return node;
    }
    case Expr::Kind::Add: node["kind"] = "add"; break;
    case Expr::Kind::Sub: node["kind"] = "sub"; break;
    case Expr::Kind::Mul: node["kind"] = "mul"; break;
    case Expr::Kind::Div:
      node["kind"] = "div";
      if (e.guarded()) node["guarded"] = true;
      break;
  }
  ordered_json args = ordered_json::array();
  for (const auto& c : e.children()) args.push_back(expr_tree(c, labels));
  node["args"] = std::move(args);
  return node;
}

}  // namespace bond::detail

#endif  // BOND_SRC_JSON_TREE_HPP
