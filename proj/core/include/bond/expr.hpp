#ifndef BOND_EXPR_HPP
#define BOND_EXPR_HPP

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace bond {

/// What a variable leaf refers to.
enum class VarKind {
  Param,    ///< model parameter (index into the model's parameter table)
  Arg,      ///< kinetic-law site argument (index into the law's argument list)
  LawParam, ///< kinetic-law formal parameter (index into the law's parameter list)
  Species,  ///< concentration of a prime species (index into the prime index)
};

struct ExprNode;

/// Immutable arithmetic expression tree; `add`/`mul` are n-ary.
class Expr {
 public:
  enum class Kind { Const, Var, Add, Sub, Mul, Div };

  Expr();  // the constant 0

  static Expr constant(double value);
  static Expr var(VarKind kind, std::size_t index, std::string name);
  static Expr add(std::vector<Expr> terms);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(std::vector<Expr> factors);
  /// `guarded` divisions evaluate to 0 when the denominator is 0.
  static Expr div(Expr numerator, Expr denominator, bool guarded = false);

  Kind kind() const;
  double value() const;                 ///< Const only
  VarKind var_kind() const;             ///< Var only
  std::size_t var_index() const;        ///< Var only
  const std::string& var_name() const;  ///< Var only
  const std::vector<Expr>& children() const;
  bool guarded() const;  ///< Div only

  bool is_constant(double v) const { return kind() == Kind::Const && value() == v; }

 private:
  explicit Expr(std::shared_ptr<const ExprNode> node) : node_(std::move(node)) {}
  std::shared_ptr<const ExprNode> node_;
};

struct ExprNode {
  Expr::Kind kind = Expr::Kind::Const;
  double value = 0.0;
  VarKind var_kind = VarKind::Param;
  std::size_t index = 0;
  std::string name;
  std::vector<Expr> children;
  bool guarded = false;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);

/// Values for variable leaves. Unset kinds throw when encountered.
struct EvalEnv {
  std::span<const double> params;
  std::span<const double> args;
  std::span<const double> law_params;
  std::span<const double> species;
};

double evaluate(const Expr& e, const EvalEnv& env);

/// Replaces variable leaves by `fn(leaf)` when it returns an expression.
using Substitution = std::function<const Expr*(const Expr& leaf)>;
Expr substitute(const Expr& e, const Substitution& fn);

/// Constant folding and flattening: nested add/mul are merged, constants are
/// folded, identities dropped, commutative operands sorted, like terms of a
/// sum collected. No other algebraic rewriting.
Expr simplify(const Expr& e);

/// Deterministic structural key; equal keys mean structurally equal trees.
std::string structural_key(const Expr& e);

/// Removes one factor `arg` from a product-shaped expression. Returns false
/// when `arg` is not a syntactic factor of `e`.
bool divide_out(const Expr& e, const Expr& factor, Expr& quotient);

bool references(const Expr& e, VarKind kind, std::size_t index);

/// Shortest round-trip decimal representation.
std::string format_number(double v);

using VarNamer = std::function<std::string(const Expr& leaf)>;

/// Infix rendering, e.g. `s + f*[C]/(g + [TC])`.
std::string render_text(const Expr& e, const VarNamer& namer);
std::string render_latex(const Expr& e, const VarNamer& namer);

}  // namespace bond

#endif  // BOND_EXPR_HPP
