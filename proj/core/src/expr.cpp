#include "bond/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <stdexcept>

namespace bond {

namespace {

std::shared_ptr<const ExprNode> make_node(ExprNode node) {
  return std::make_shared<const ExprNode>(std::move(node));
}

const ExprNode& node_of(const std::shared_ptr<const ExprNode>& n) { return *n; }

bool is_const(const Expr& e) { return e.kind() == Expr::Kind::Const; }

// Splits `c*rest` into its numeric coefficient and remaining factors.
std::pair<double, std::vector<Expr>> split_coefficient(const Expr& e) {
  if (is_const(e)) return {e.value(), {}};
  if (e.kind() == Expr::Kind::Mul) {
    const auto& factors = e.children();
    if (!factors.empty() && is_const(factors.front())) {
      return {factors.front().value(), {factors.begin() + 1, factors.end()}};
    }
    return {1.0, factors};
  }
  return {1.0, {e}};
}

Expr product_of(double coef, std::vector<Expr> factors) {
  if (coef == 0.0) return Expr::constant(0.0);
  if (factors.empty()) return Expr::constant(coef);
  if (coef == 1.0 && factors.size() == 1) return factors.front();
  if (coef != 1.0) factors.insert(factors.begin(), Expr::constant(coef));
  return Expr::mul(std::move(factors));
}

// Product order: variables before compound factors, then by key.
bool by_factor_order(const Expr& a, const Expr& b) {
  bool ca = a.kind() != Expr::Kind::Var;
  bool cb = b.kind() != Expr::Kind::Var;
  if (ca != cb) return cb;
  return structural_key(a) < structural_key(b);
}

std::string var_key(const Expr& e) {
  static const char* kinds[] = {"p", "a", "q", "x"};
  return std::string("v") + kinds[static_cast<int>(e.var_kind())] + std::to_string(e.var_index());
}

// Precedence: 1 sum, 2 product/quotient, 3 atom.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
      return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return 2;
    case Expr::Kind::Const:
      return e.value() < 0 ? 1 : 3;
    case Expr::Kind::Var:
      return 3;
  }
  return 3;
}

bool is_negative_term(const Expr& e) {
  if (is_const(e)) return e.value() < 0;
  if (e.kind() == Expr::Kind::Mul && !e.children().empty() && is_const(e.children().front())) {
    return e.children().front().value() < 0;
  }
  return false;
}

Expr negate_term(const Expr& e) {
  auto [coef, rest] = split_coefficient(e);
  return product_of(-coef, rest);
}

struct Renderer {
  const VarNamer& namer;
  bool latex;

  std::string wrap(const Expr& e, int min_prec) const {
    std::string s = render(e);
    if (precedence(e) < min_prec) return latex ? "\\left(" + s + "\\right)" : "(" + s + ")";
    return s;
  }

  std::string render(const Expr& e) const {
    switch (e.kind()) {
      case Expr::Kind::Const:
        return format_number(e.value());
      case Expr::Kind::Var:
        return namer(e);
      case Expr::Kind::Add: {
        std::string out;
        const auto& terms = e.children();
        for (std::size_t i = 0; i < terms.size(); ++i) {
          if (i == 0) {
            out += render(terms[i]);
          } else if (is_negative_term(terms[i])) {
            out += " - " + wrap(negate_term(terms[i]), 2);
          } else {
            out += " + " + render(terms[i]);
          }
        }
        return out;
      }
      case Expr::Kind::Sub:
        return render(e.children()[0]) + " - " + wrap(e.children()[1], 2);
      case Expr::Kind::Mul:
        return render_product(e);
      case Expr::Kind::Div: {
        const Expr& num = e.children()[0];
        const Expr& den = e.children()[1];
        if (latex) return "\\frac{" + render(num) + "}{" + render(den) + "}";
        return wrap(num, 2) + "/" + wrap(den, 3);
      }
    }
    return {};
  }

  std::string render_product(const Expr& e) const {
    auto [coef, factors] = split_coefficient(e);
    std::string out;
    if (coef == -1.0 && !factors.empty()) {
      out = "-";
    } else if (coef != 1.0 || factors.empty()) {
      out = format_number(coef);
      if (!factors.empty()) out += latex ? " " : "*";
    }
    for (std::size_t i = 0; i < factors.size();) {
      std::size_t j = i + 1;
      while (j < factors.size() && structural_key(factors[j]) == structural_key(factors[i])) ++j;
      std::size_t power = j - i;
      if (i > 0) out += latex ? " " : "*";
      std::string base = wrap(factors[i], power > 1 ? 3 : 2);
      if (power > 1) {
        base += latex ? "^{" + std::to_string(power) + "}" : "^" + std::to_string(power);
      }
      out += base;
      i = j;
    }
    return out;
  }
};

}  // namespace

Expr::Expr() : node_(make_node(ExprNode{})) {}

Expr Expr::constant(double value) {
  ExprNode n;
  n.kind = Kind::Const;
  n.value = value;
  return Expr(make_node(std::move(n)));
}

Expr Expr::var(VarKind kind, std::size_t index, std::string name) {
  ExprNode n;
  n.kind = Kind::Var;
  n.var_kind = kind;
  n.index = index;
  n.name = std::move(name);
  return Expr(make_node(std::move(n)));
}

Expr Expr::add(std::vector<Expr> terms) {
  if (terms.empty()) return constant(0.0);
  if (terms.size() == 1) return terms.front();
  ExprNode n;
  n.kind = Kind::Add;
  n.children = std::move(terms);
  return Expr(make_node(std::move(n)));
}

Expr Expr::sub(Expr lhs, Expr rhs) {
  ExprNode n;
  n.kind = Kind::Sub;
  n.children = {std::move(lhs), std::move(rhs)};
  return Expr(make_node(std::move(n)));
}

Expr Expr::mul(std::vector<Expr> factors) {
  if (factors.empty()) return constant(1.0);
  if (factors.size() == 1) return factors.front();
  ExprNode n;
  n.kind = Kind::Mul;
  n.children = std::move(factors);
  return Expr(make_node(std::move(n)));
}

Expr Expr::div(Expr numerator, Expr denominator, bool guarded) {
  ExprNode n;
  n.kind = Kind::Div;
  n.children = {std::move(numerator), std::move(denominator)};
  n.guarded = guarded;
  return Expr(make_node(std::move(n)));
}

Expr::Kind Expr::kind() const { return node_of(node_).kind; }
double Expr::value() const { return node_of(node_).value; }
VarKind Expr::var_kind() const { return node_of(node_).var_kind; }
std::size_t Expr::var_index() const { return node_of(node_).index; }
const std::string& Expr::var_name() const { return node_of(node_).name; }
const std::vector<Expr>& Expr::children() const { return node_of(node_).children; }
bool Expr::guarded() const { return node_of(node_).guarded; }

Expr operator+(Expr a, Expr b) { return Expr::add({std::move(a), std::move(b)}); }
Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
Expr operator*(Expr a, Expr b) { return Expr::mul({std::move(a), std::move(b)}); }
Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }

double evaluate(const Expr& e, const EvalEnv& env) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return e.value();
    case Expr::Kind::Var: {
      std::span<const double> values;
      switch (e.var_kind()) {
        case VarKind::Param: values = env.params; break;
        case VarKind::Arg: values = env.args; break;
        case VarKind::LawParam: values = env.law_params; break;
        case VarKind::Species: values = env.species; break;
      }
      if (e.var_index() >= values.size()) {
        throw std::out_of_range("unbound variable '" + e.var_name() + "' in expression");
      }
      return values[e.var_index()];
    }
    case Expr::Kind::Add: {
      double s = 0.0;
      for (const auto& c : e.children()) s += evaluate(c, env);
      return s;
    }
    case Expr::Kind::Sub:
      return evaluate(e.children()[0], env) - evaluate(e.children()[1], env);
    case Expr::Kind::Mul: {
      double p = 1.0;
      for (const auto& c : e.children()) p *= evaluate(c, env);
      return p;
    }
    case Expr::Kind::Div: {
      double den = evaluate(e.children()[1], env);
      if (e.guarded() && den == 0.0) return 0.0;
      return evaluate(e.children()[0], env) / den;
    }
  }
  return 0.0;
}

Expr substitute(const Expr& e, const Substitution& fn) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return e;
    case Expr::Kind::Var: {
      const Expr* replacement = fn(e);
      return replacement ? *replacement : e;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Mul: {
      std::vector<Expr> children;
      children.reserve(e.children().size());
      for (const auto& c : e.children()) children.push_back(substitute(c, fn));
      return e.kind() == Expr::Kind::Add ? Expr::add(std::move(children))
                                         : Expr::mul(std::move(children));
    }
    case Expr::Kind::Sub:
      return Expr::sub(substitute(e.children()[0], fn), substitute(e.children()[1], fn));
    case Expr::Kind::Div:
      return Expr::div(substitute(e.children()[0], fn), substitute(e.children()[1], fn),
                       e.guarded());
  }
  return e;
}

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const:
    case Expr::Kind::Var:
      return e;
    case Expr::Kind::Sub:
      return simplify(Expr::add({e.children()[0], Expr::mul({Expr::constant(-1.0), e.children()[1]})}));
    case Expr::Kind::Add: {
      std::vector<Expr> flat;
      for (const auto& c : e.children()) {
        Expr s = simplify(c);
        if (s.kind() == Expr::Kind::Add) {
          flat.insert(flat.end(), s.children().begin(), s.children().end());
        } else {
          flat.push_back(std::move(s));
        }
      }
      double constant = 0.0;
      std::map<std::string, std::pair<double, std::vector<Expr>>> collected;
      for (const auto& t : flat) {
        auto [coef, rest] = split_coefficient(t);
        if (rest.empty()) {
          constant += coef;
          continue;
        }
        std::string key = structural_key(Expr::mul(rest));
        auto [it, inserted] = collected.try_emplace(key, 0.0, rest);
        it->second.first += coef;
      }
      std::vector<Expr> terms;
      if (constant != 0.0) terms.push_back(Expr::constant(constant));
      for (auto& [key, entry] : collected) {
        if (entry.first == 0.0) continue;
        terms.push_back(product_of(entry.first, entry.second));
      }
      if (terms.empty()) return Expr::constant(0.0);
      return Expr::add(std::move(terms));
    }
    case Expr::Kind::Mul: {
      double coef = 1.0;
      std::vector<Expr> factors;
      for (const auto& c : e.children()) {
        Expr s = simplify(c);
        auto [k, rest] = split_coefficient(s);
        coef *= k;
        if (s.kind() == Expr::Kind::Mul) {
          factors.insert(factors.end(), rest.begin(), rest.end());
        } else if (!rest.empty()) {
          factors.push_back(s);
        }
      }
      if (coef == 0.0) return Expr::constant(0.0);
      std::sort(factors.begin(), factors.end(), by_factor_order);
      return product_of(coef, std::move(factors));
    }
    case Expr::Kind::Div: {
      Expr num = simplify(e.children()[0]);
      Expr den = simplify(e.children()[1]);
      if (num.is_constant(0.0)) return Expr::constant(0.0);
      if (is_const(den)) {
        if (den.value() == 0.0) {
          return e.guarded() ? Expr::constant(0.0) : Expr::div(num, den, false);
        }
        return simplify(Expr::mul({Expr::constant(1.0 / den.value()), num}));
      }
      if (structural_key(num) == structural_key(den) && !e.guarded()) return Expr::constant(1.0);
      auto [coef, rest] = split_coefficient(num);
      if (coef != 1.0) {
        return product_of(coef, {Expr::div(product_of(1.0, rest), den, e.guarded())});
      }
      return Expr::div(num, den, e.guarded());
    }
  }
  return e;
}

std::string structural_key(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Const:
      return "c" + format_number(e.value());
    case Expr::Kind::Var:
      return var_key(e);
    case Expr::Kind::Add:
    case Expr::Kind::Sub:
    case Expr::Kind::Mul:
    case Expr::Kind::Div: {
      static const char* ops[] = {"", "", "+", "-", "*", "/"};
      std::string out = "(";
      out += ops[static_cast<int>(e.kind())];
      if (e.kind() == Expr::Kind::Div && e.guarded()) out += "?";
      for (const auto& c : e.children()) out += " " + structural_key(c);
      return out + ")";
    }
  }
  return {};
}

bool divide_out(const Expr& e, const Expr& factor, Expr& quotient) {
  const std::string key = structural_key(factor);
  if (structural_key(e) == key) {
    quotient = Expr::constant(1.0);
    return true;
  }
  switch (e.kind()) {
    case Expr::Kind::Mul: {
      const auto& fs = e.children();
      for (std::size_t i = 0; i < fs.size(); ++i) {
        Expr inner;
        if (divide_out(fs[i], factor, inner)) {
          std::vector<Expr> rest(fs.begin(), fs.end());
          rest[i] = inner;
          quotient = Expr::mul(std::move(rest));
          return true;
        }
      }
      return false;
    }
    case Expr::Kind::Div: {
      Expr inner;
      if (!divide_out(e.children()[0], factor, inner)) return false;
      quotient = Expr::div(inner, e.children()[1], e.guarded());
      return true;
    }
    case Expr::Kind::Add:
    case Expr::Kind::Sub: {
      std::vector<Expr> parts;
      for (const auto& c : e.children()) {
        Expr inner;
        if (!divide_out(c, factor, inner)) return false;
        parts.push_back(inner);
      }
      quotient = e.kind() == Expr::Kind::Add ? Expr::add(std::move(parts))
                                             : Expr::sub(parts[0], parts[1]);
      return true;
    }
    default:
      return false;
  }
}

bool references(const Expr& e, VarKind kind, std::size_t index) {
  if (e.kind() == Expr::Kind::Var) return e.var_kind() == kind && e.var_index() == index;
  for (const auto& c : e.children()) {
    if (references(c, kind, index)) return true;
  }
  return false;
}

std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

std::string render_text(const Expr& e, const VarNamer& namer) {
  return Renderer{namer, false}.render(e);
}

std::string render_latex(const Expr& e, const VarNamer& namer) {
  return Renderer{namer, true}.render(e);
}

}  // namespace bond
