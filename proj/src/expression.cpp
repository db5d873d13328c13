#include "penaltylab/expression.hpp"

#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <numeric>

namespace penaltylab {

namespace {

std::shared_ptr<Node> make(NodeKind kind) {
  auto n = std::make_shared<Node>();
  n->kind = kind;
  return n;
}

Expression unary(NodeKind kind, const Expression& e) {
  auto n = make(kind);
  n->children = {e};
  return Expression(std::move(n));
}

Expression binary(NodeKind kind, const Expression& a, const Expression& b) {
  auto n = make(kind);
  n->children = {a, b};
  return Expression(std::move(n));
}

Expression nary(NodeKind kind, std::vector<Expression> args) {
  if (args.empty()) throw UsageError("max/min need at least one argument");
  auto n = make(kind);
  n->children = std::move(args);
  return Expression(std::move(n));
}

}  // namespace

// ---------------------------------------------------------------- builders

Expression constant(double value) {
  if (!std::isfinite(value)) throw UsageError("constants must be finite");
  auto n = make(NodeKind::Constant);
  n->constant = value;
  return Expression(std::move(n));
}

Expression variable(int index) {
  if (index < 0) throw UsageError("negative variable index");
  auto n = make(NodeKind::Variable);
  n->variable = index;
  return Expression(std::move(n));
}

Expression operator-(const Expression& e) { return unary(NodeKind::Negate, e); }
Expression operator+(const Expression& a, const Expression& b) { return binary(NodeKind::Add, a, b); }
Expression operator-(const Expression& a, const Expression& b) { return binary(NodeKind::Subtract, a, b); }
Expression operator*(const Expression& a, const Expression& b) { return binary(NodeKind::Multiply, a, b); }
Expression operator/(const Expression& a, const Expression& b) { return binary(NodeKind::Divide, a, b); }

Expression pow(const Expression& base, long num, long den) {
  if (den == 0) throw UsageError("zero exponent denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long g = std::gcd(num == 0 ? den : std::labs(num), den);
  auto n = make(NodeKind::Power);
  n->children = {base};
  n->exp_num = num / g;
  n->exp_den = den / g;
  return Expression(std::move(n));
}

Expression abs(const Expression& e) { return unary(NodeKind::Abs, e); }
Expression pos(const Expression& e) { return unary(NodeKind::PlusPart, e); }
Expression max(std::vector<Expression> args) { return nary(NodeKind::Max, std::move(args)); }
Expression min(std::vector<Expression> args) { return nary(NodeKind::Min, std::move(args)); }
Expression exp(const Expression& e) { return unary(NodeKind::Exp, e); }

Expression indicator(Guard guard) {
  if (guard.atoms.empty()) throw UsageError("empty guard");
  auto n = make(NodeKind::Indicator);
  n->guard = std::move(guard);
  return Expression(std::move(n));
}

Expression piecewise(std::vector<Branch> branches, Expression fallback) {
  auto n = make(NodeKind::Piecewise);
  n->branches = std::move(branches);
  n->children = {std::move(fallback)};
  return Expression(std::move(n));
}

// ---------------------------------------------------------------- queries

namespace {

template <class Visit>
void walk(const Expression& e, Visit&& visit) {
  const Node& n = e.node();
  visit(n);
  for (const auto& c : n.children) walk(c, visit);
  for (const auto& a : n.guard.atoms) walk(a.lhs, visit);
  for (const auto& b : n.branches) {
    for (const auto& a : b.guard.atoms) walk(a.lhs, visit);
    walk(b.value, visit);
  }
}

}  // namespace

int Expression::max_variable() const {
  int m = -1;
  walk(*this, [&](const Node& n) {
    if (n.kind == NodeKind::Variable) m = std::max(m, n.variable);
  });
  return m;
}

bool Expression::uses_exp() const {
  bool found = false;
  walk(*this, [&](const Node& n) { found = found || n.kind == NodeKind::Exp; });
  return found;
}

namespace {

bool guards_equal(const Guard& a, const Guard& b) {
  if (a.atoms.size() != b.atoms.size()) return false;
  for (std::size_t i = 0; i < a.atoms.size(); ++i) {
    if (a.atoms[i].cmp != b.atoms[i].cmp) return false;
    if (!structurally_equal(a.atoms[i].lhs, b.atoms[i].lhs)) return false;
  }
  return true;
}

}  // namespace

bool structurally_equal(const Expression& a, const Expression& b) {
  const Node& x = a.node();
  const Node& y = b.node();
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::Constant:
      return x.constant == y.constant;
    case NodeKind::Variable:
      return x.variable == y.variable;
    case NodeKind::Power:
      if (x.exp_num != y.exp_num || x.exp_den != y.exp_den) return false;
      break;
    case NodeKind::Indicator:
      return guards_equal(x.guard, y.guard);
    case NodeKind::Piecewise:
      if (x.branches.size() != y.branches.size()) return false;
      for (std::size_t i = 0; i < x.branches.size(); ++i) {
        if (!guards_equal(x.branches[i].guard, y.branches[i].guard)) return false;
        if (!structurally_equal(x.branches[i].value, y.branches[i].value)) return false;
      }
      break;
    default:
      break;
  }
  if (x.children.size() != y.children.size()) return false;
  for (std::size_t i = 0; i < x.children.size(); ++i)
    if (!structurally_equal(x.children[i], y.children[i])) return false;
  return true;
}

// ---------------------------------------------------------------- evaluation

namespace {

ExtReal eval_power(ExtReal base, long p, long q) {
  if (p == 0) return ExtReal(1.0);
  if (base.is_infinite()) return p > 0 ? ExtReal::infinity() : ExtReal(0.0);
  const double b = base.value();
  if (b == 0.0) {
    if (p < 0) throw EvalError(EvalErrorKind::DivisionByZero, "zero raised to a negative power");
    return ExtReal(0.0);
  }
  if (q == 1) return ExtReal(std::pow(b, static_cast<double>(p)));
  const double exponent = static_cast<double>(p) / static_cast<double>(q);
  if (b > 0.0) return ExtReal(std::pow(b, exponent));
  if (q % 2 == 0)
    throw EvalError(EvalErrorKind::EvenRootOfNegative, "even root of a negative number");
  const double r = std::pow(-b, exponent);
  return ExtReal(p % 2 != 0 ? -r : r);
}

}  // namespace

bool holds(const Guard& g, const Vec& x) {
  for (const auto& atom : g.atoms) {
    const ExtReal v = eval(atom.lhs, x);
    bool ok = false;
    switch (atom.cmp) {
      case Comparison::Equal: ok = v.is_finite() && v.value() == 0.0; break;
      case Comparison::NotEqual: ok = v.is_infinite() || v.value() != 0.0; break;
      case Comparison::LessEqual: ok = v.is_finite() && v.value() <= 0.0; break;
      case Comparison::Less: ok = v.is_finite() && v.value() < 0.0; break;
    }
    if (!ok) return false;
  }
  return true;
}

ExtReal eval(const Expression& e, const Vec& x) {
  const Node& n = e.node();
  const auto child = [&](std::size_t i) { return eval(n.children[i], x); };
  switch (n.kind) {
    case NodeKind::Constant:
      return ExtReal(n.constant);
    case NodeKind::Variable:
      if (n.variable >= x.size())
        throw EvalError(EvalErrorKind::DimensionMismatch, "point has too few coordinates");
      return ExtReal(x[n.variable]);
    case NodeKind::Negate:
      return ExtReal(0.0) - child(0);
    case NodeKind::Add:
      return child(0) + child(1);
    case NodeKind::Subtract:
      return child(0) - child(1);
    case NodeKind::Multiply:
      return child(0) * child(1);
    case NodeKind::Divide: {
      const ExtReal a = child(0);
      const ExtReal b = child(1);
      if (b.is_infinite()) {
        if (a.is_infinite()) throw EvalError(EvalErrorKind::NonFinite, "inf / inf");
        return ExtReal(0.0);
      }
      if (b.value() == 0.0) throw EvalError(EvalErrorKind::DivisionByZero, "division by zero");
      if (a.is_infinite()) {
        if (b.value() < 0.0) throw EvalError(EvalErrorKind::NegativeInfinity, "inf / negative");
        return ExtReal::infinity();
      }
      return ExtReal(a.value() / b.value());
    }
    case NodeKind::Power:
      return eval_power(child(0), n.exp_num, n.exp_den);
    case NodeKind::Abs: {
      const ExtReal v = child(0);
      return v.is_infinite() ? v : ExtReal(std::fabs(v.value()));
    }
    case NodeKind::PlusPart:
      return ext_max(child(0), ExtReal(0.0));
    case NodeKind::Max: {
      ExtReal best = child(0);
      for (std::size_t i = 1; i < n.children.size(); ++i) best = ext_max(best, child(i));
      return best;
    }
    case NodeKind::Min: {
      ExtReal best = child(0);
      for (std::size_t i = 1; i < n.children.size(); ++i) best = ext_min(best, child(i));
      return best;
    }
    case NodeKind::Exp: {
      const ExtReal v = child(0);
      return v.is_infinite() ? v : ExtReal(std::exp(v.value()));
    }
    case NodeKind::Indicator:
      return holds(n.guard, x) ? ExtReal(0.0) : ExtReal::infinity();
    case NodeKind::Piecewise:
      for (const auto& b : n.branches)
        if (holds(b.guard, x)) return eval(b.value, x);
      return child(0);
  }
  return ExtReal::infinity();
}

double eval_or_inf(const Expression& e, const Vec& x) noexcept {
  try {
    return eval(e, x).value();
  } catch (const Error&) {
    return kInf;
  }
}

ScalarFn as_function(const Expression& e) {
  return [e](const Vec& x) { return eval_or_inf(e, x); };
}

// ---------------------------------------------------------------- printing

namespace {

// Binding strength used to decide where parentheses are required.
enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kAtom = 5 };

std::string number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  // Prefer the shortest representation that still round-trips.
  for (int digits = 1; digits < 17; ++digits) {
    char shorter[32];
    std::snprintf(shorter, sizeof shorter, "%.*g", digits, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

int precedence(const Node& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Subtract:
      return kSum;
    case NodeKind::Multiply:
    case NodeKind::Divide:
      return kProduct;
    case NodeKind::Negate:
      return kUnary;
    case NodeKind::Constant:
      return n.constant < 0.0 || std::signbit(n.constant) ? kUnary : kAtom;
    default:
      return kAtom;  // power binds tighter than unary minus
  }
}

std::string print(const Expression& e, int context);

std::string print_guard(const Guard& g) {
  std::string out;
  for (std::size_t i = 0; i < g.atoms.size(); ++i) {
    if (i) out += " && ";
    out += print(g.atoms[i].lhs, 0);
    switch (g.atoms[i].cmp) {
      case Comparison::Equal: out += " == 0"; break;
      case Comparison::NotEqual: out += " != 0"; break;
      case Comparison::LessEqual: out += " <= 0"; break;
      case Comparison::Less: out += " < 0"; break;
    }
  }
  return out;
}

std::string print_exponent(long p, long q) {
  if (q == 1 && p >= 0) return std::to_string(p);
  std::string s = "(" + std::to_string(p);
  if (q != 1) s += "/" + std::to_string(q);
  return s + ")";
}

std::string print(const Expression& e, int context) {
  const Node& n = e.node();
  std::string s;
  switch (n.kind) {
    case NodeKind::Constant:
      s = number(n.constant);
      break;
    case NodeKind::Variable:
      s = "x" + std::to_string(n.variable);
      break;
    case NodeKind::Negate: {
      const Node& c = n.children[0].node();
      // "-3" would read back as a negative constant, so shield numbers.
      if (c.kind == NodeKind::Constant)
        s = "-(" + print(n.children[0], 0) + ")";
      else
        s = "-" + print(n.children[0], kUnary);
      break;
    }
    case NodeKind::Add:
    case NodeKind::Subtract:
      s = print(n.children[0], kSum) + (n.kind == NodeKind::Add ? " + " : " - ") +
          print(n.children[1], kProduct);
      break;
    case NodeKind::Multiply:
    case NodeKind::Divide:
      s = print(n.children[0], kProduct) + (n.kind == NodeKind::Multiply ? "*" : "/") +
          print(n.children[1], kUnary);
      break;
    case NodeKind::Power:
      s = print(n.children[0], kAtom + 1) + "^" + print_exponent(n.exp_num, n.exp_den);
      break;
    case NodeKind::Abs:
      s = "abs(" + print(n.children[0], 0) + ")";
      break;
    case NodeKind::PlusPart:
      s = "pos(" + print(n.children[0], 0) + ")";
      break;
    case NodeKind::Exp:
      s = "exp(" + print(n.children[0], 0) + ")";
      break;
    case NodeKind::Max:
    case NodeKind::Min: {
      s = n.kind == NodeKind::Max ? "max(" : "min(";
      for (std::size_t i = 0; i < n.children.size(); ++i) {
        if (i) s += ", ";
        s += print(n.children[i], 0);
      }
      s += ")";
      break;
    }
    case NodeKind::Indicator:
      s = "ind(" + print_guard(n.guard) + ")";
      break;
    case NodeKind::Piecewise: {
      s = "pw(";
      for (const auto& b : n.branches) s += "(" + print_guard(b.guard) + ": " + print(b.value, 0) + "), ";
      s += "default: " + print(n.children[0], 0) + ")";
      break;
    }
  }
  // Power bases must be plain atoms (variables, calls, nonnegative numbers);
  // nested powers are parenthesized too.
  const int own = precedence(n);
  const bool needs = context == kAtom + 1 ? (own < kAtom || n.kind == NodeKind::Power) : own < context;
  return needs ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Expression& e) { return print(e, 0); }

// ---------------------------------------------------------------- parsing

namespace {

class Parser {
 public:
  Parser(std::string_view text, int dimension) : text_(text), dim_(dimension) {}

  Expression parse_all() {
    Expression e = expr();
    skip();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(std::string_view tok) {
    skip();
    return text_.substr(pos_, tok.size()) == tok;
  }

  bool accept(std::string_view tok) {
    if (!peek(tok)) return false;
    pos_ += tok.size();
    return true;
  }

  void expect(std::string_view tok) {
    if (!accept(tok)) fail("expected '" + std::string(tok) + "'");
  }

  bool at_number() {
    skip();
    return pos_ < text_.size() &&
           (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.');
  }

  double number() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.'))
      ++pos_;
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) {
        pos_ = p;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size() || !std::isfinite(v)) {
      pos_ = start;
      fail("malformed number");
    }
    return v;
  }

  long integer() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (start == pos_) fail("expected integer");
    return std::stol(std::string(text_.substr(start, pos_ - start)));
  }

  std::string identifier() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  Expression expr() {
    Expression lhs = term();
    for (;;) {
      if (accept("+"))
        lhs = lhs + term();
      else if (accept("-"))
        lhs = lhs - term();
      else
        return lhs;
    }
  }

  Expression term() {
    Expression lhs = unary_expr();
    for (;;) {
      if (accept("*"))
        lhs = lhs * unary_expr();
      else if (accept("/"))
        lhs = lhs / unary_expr();
      else
        return lhs;
    }
  }

  Expression unary_expr() {
    if (accept("-")) {
      if (at_number()) {
        const std::size_t save = pos_;
        const double v = number();
        if (!peek("^")) return constant(-v);
        pos_ = save;
      }
      return -unary_expr();
    }
    return power();
  }

  Expression power() {
    Expression base = atom();
    if (!accept("^")) return base;
    if (accept("(")) {
      const bool negative = accept("-");
      long p = integer();
      long q = 1;
      if (accept("/")) q = integer();
      expect(")");
      if (q == 0) fail("zero exponent denominator");
      return pow(base, negative ? -p : p, q);
    }
    return pow(base, integer(), 1);
  }

  Expression atom() {
    if (at_number()) return constant(number());
    if (accept("(")) {
      Expression e = expr();
      expect(")");
      return e;
    }
    skip();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == 'x' && pos_ + 1 < text_.size() &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      ++pos_;
      const long index = integer();
      if (index >= dim_) {
        pos_ = start;
        fail("variable x" + std::to_string(index) + " out of range for dimension " + std::to_string(dim_));
      }
      return variable(static_cast<int>(index));
    }
    const std::string name = identifier();
    if (name.empty()) fail("expected expression");
    if (!peek("(")) {
      pos_ = start;
      fail("unknown identifier '" + name + "'");
    }
    expect("(");
    Expression out;
    if (name == "abs" || name == "pos" || name == "exp") {
      Expression arg = expr();
      out = name == "abs" ? abs(arg) : name == "pos" ? pos(arg) : exp(arg);
    } else if (name == "max" || name == "min") {
      std::vector<Expression> args{expr()};
      while (accept(",")) args.push_back(expr());
      out = name == "max" ? max(std::move(args)) : min(std::move(args));
    } else if (name == "ind") {
      out = indicator(guard());
    } else if (name == "pw") {
      std::vector<Branch> branches;
      while (!peek("default")) {
        expect("(");
        Guard g = guard();
        expect(":");
        Expression value = expr();
        expect(")");
        expect(",");
        branches.push_back({std::move(g), std::move(value)});
      }
      expect("default");
      expect(":");
      out = piecewise(std::move(branches), expr());
    } else {
      pos_ = start;
      fail("unknown function '" + name + "'");
    }
    expect(")");
    return out;
  }

  Guard guard() {
    Guard g;
    do {
      Expression lhs = expr();
      Comparison cmp;
      if (accept("=="))
        cmp = Comparison::Equal;
      else if (accept("!="))
        cmp = Comparison::NotEqual;
      else if (accept("<="))
        cmp = Comparison::LessEqual;
      else if (accept("<"))
        cmp = Comparison::Less;
      else
        fail("expected comparison operator");
      skip();
      const std::size_t at = pos_;
      if (!at_number() || number() != 0.0) {
        pos_ = at;
        fail("guard right-hand side must be 0");
      }
      g.atoms.push_back({std::move(lhs), cmp});
    } while (accept("&&"));
    return g;
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression parse(std::string_view text, int dimension) {
  if (dimension < 1) throw UsageError("dimension must be positive");
  return Parser(text, dimension).parse_all();
}

}  // namespace penaltylab
