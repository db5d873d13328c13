#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "penaltylab/ext_real.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

enum class NodeKind {
  Constant,
  Variable,
  Negate,
  Add,
  Subtract,
  Multiply,
  Divide,
  Power,
  Abs,
  PlusPart,
  Max,
  Min,
  Exp,
  Indicator,
  Piecewise,
};

/// Comparison of a sub-expression against zero inside a guard.
enum class Comparison { Equal, NotEqual, LessEqual, Less };

struct Node;

/// Immutable, cheaply copyable handle to an expression tree over x0..x{n-1}.
class Expression {
 public:
  Expression() = default;
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  const Node& node() const { return *node_; }
  bool empty() const noexcept { return node_ == nullptr; }

  /// Largest variable index referenced, or -1 for a closed expression.
  int max_variable() const;
  /// True when the tree contains exp(), which is not semi-algebraic.
  bool uses_exp() const;

 private:
  std::shared_ptr<const Node> node_;
};

struct GuardAtom {
  Expression lhs;
  Comparison cmp;
};

/// Conjunction of atoms `lhs cmp 0`.
struct Guard {
  std::vector<GuardAtom> atoms;
};

struct Branch {
  Guard guard;
  Expression value;
};

struct Node {
  NodeKind kind;
  double constant = 0.0;
  int variable = 0;
  // Rational exponent p/q in lowest terms, q > 0.
  long exp_num = 1;
  long exp_den = 1;
  std::vector<Expression> children;
  Guard guard;                    // Indicator
  std::vector<Branch> branches;   // Piecewise; default lives in children[0]
};

// Builders. Arithmetic operators compose trees the same way the parser does.
Expression constant(double value);
Expression variable(int index);
Expression operator-(const Expression& e);
Expression operator+(const Expression& a, const Expression& b);
Expression operator-(const Expression& a, const Expression& b);
Expression operator*(const Expression& a, const Expression& b);
Expression operator/(const Expression& a, const Expression& b);
Expression pow(const Expression& base, long num, long den = 1);
Expression abs(const Expression& e);
Expression pos(const Expression& e);
Expression max(std::vector<Expression> args);
Expression min(std::vector<Expression> args);
Expression exp(const Expression& e);
Expression indicator(Guard guard);
Expression piecewise(std::vector<Branch> branches, Expression fallback);

/// Parses the ASCII grammar
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := '-' unary | power
///   power  := atom ('^' (INT | '(' ['-'] INT ['/' INT] ')'))?
///   atom   := NUMBER | 'x'INT | '(' expr ')' | abs|pos|exp '(' expr ')'
///           | max|min '(' expr (',' expr)* ')' | ind '(' guard ')'
///           | pw '(' ('(' guard ':' expr ')' ',')* 'default' ':' expr ')'
///   guard  := expr ('=='|'!='|'<='|'<') '0' ('&&' guard)?
/// A '-' directly followed by a number (not raised to a power) is read as a
/// negative constant.
Expression parse(std::string_view text, int dimension);

/// Canonical text that parses back to a structurally identical tree.
std::string to_string(const Expression& e);

bool structurally_equal(const Expression& a, const Expression& b);

ExtReal eval(const Expression& e, const Vec& x);
bool holds(const Guard& g, const Vec& x);

/// eval() with every EvalError mapped to +∞.
double eval_or_inf(const Expression& e, const Vec& x) noexcept;

/// Adapts an expression to the ScalarFn interface used by the solvers.
ScalarFn as_function(const Expression& e);

}  // namespace penaltylab
