#include <doctest.h>

#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/expression.hpp"
#include "penaltylab/gradient.hpp"
#include "support/oracles.hpp"

using namespace penaltylab;

namespace {

Vec v2(double a, double b) { return Vec{{a, b}}; }

double ev(const char* text, const Vec& x) { return eval(parse(text, static_cast<int>(x.size())), x).value(); }

EvalErrorKind eval_error_kind(const char* text, const Vec& x) {
  try {
    eval(parse(text, static_cast<int>(x.size())), x);
  } catch (const EvalError& e) {
    return e.kind();
  }
  FAIL("no EvalError for " << text);
  return EvalErrorKind::NonFinite;
}

}  // namespace

TEST_CASE("extended reals keep +inf and reject -inf") {
  const ExtReal inf = ExtReal::infinity();
  CHECK((inf + 3.0).is_infinite());
  CHECK((2.0 * inf).is_infinite());
  CHECK((ExtReal(0.0) * inf).value() == 0.0);
  CHECK_THROWS_AS(ExtReal(-1.0) * inf, EvalError);
  CHECK_THROWS_AS(ExtReal(1.0) - inf, EvalError);
  CHECK((inf - 5.0).is_infinite());
  CHECK_THROWS_AS(ExtReal(std::nan("")), EvalError);
  CHECK(ext_min(inf, 2.0).value() == 2.0);
  CHECK(ext_max(inf, 2.0).is_infinite());
}

TEST_CASE("arithmetic and functions evaluate as written") {
  const Vec x = v2(1.5, -2.0);
  CHECK(ev("x0 + 2*x1", x) == doctest::Approx(-2.5));
  CHECK(ev("x0*x1 - x0/x1", x) == doctest::Approx(-3.0 + 0.75));
  CHECK(ev("-x1^2", x) == doctest::Approx(-4.0));
  CHECK(ev("x1^3", x) == doctest::Approx(-8.0));
  CHECK(ev("abs(x1) + pos(x1) + pos(x0)", x) == doctest::Approx(3.5));
  CHECK(ev("max(x0, x1, 0.5)", x) == doctest::Approx(1.5));
  CHECK(ev("min(x0, x1, 0.5)", x) == doctest::Approx(-2.0));
  CHECK(ev("exp(x0*x1)", x) == doctest::Approx(std::exp(-3.0)));
  CHECK(ev("x0^(1/2)", x) == doctest::Approx(std::sqrt(1.5)));
  CHECK(ev("x1^(1/3)", x) == doctest::Approx(-std::cbrt(2.0)));
  CHECK(ev("x0^(-1)", x) == doctest::Approx(1.0 / 1.5));
  CHECK(ev("-2 + x0", x) == doctest::Approx(-0.5));
}

TEST_CASE("guards drive indicators and piecewise branches") {
  CHECK(ev("ind(x0 <= 0)", v2(-1, 0)) == 0.0);
  CHECK(std::isinf(ev("ind(x0 <= 0)", v2(1, 0))));
  CHECK(ev("x1 + ind(x0 - 1 == 0 && x1 < 0)", v2(1, -3)) == -3.0);
  const char* pw = "pw((x0 < 0: -x0), (x0 - 1 <= 0: x0^2), default: 1)";
  CHECK(ev(pw, v2(-2, 0)) == 2.0);
  CHECK(ev(pw, v2(0.5, 0)) == 0.25);
  CHECK(ev(pw, v2(3, 0)) == 1.0);
  CHECK(ev("pw((x0 != 0: 1), default: 0)", v2(0, 0)) == 0.0);
}

TEST_CASE("evaluation errors are typed") {
  CHECK(eval_error_kind("1/x0", v2(0, 0)) == EvalErrorKind::DivisionByZero);
  CHECK(eval_error_kind("x0^(1/2)", v2(-1, 0)) == EvalErrorKind::EvenRootOfNegative);
  CHECK(eval_error_kind("x0 - ind(x1 < 0)", v2(0, 1)) == EvalErrorKind::NegativeInfinity);
  CHECK(eval_error_kind("exp(x0) - exp(x0)", v2(1e6, 0)) == EvalErrorKind::NegativeInfinity);
  CHECK(eval(parse("exp(x0)", 1), Vec{{1e6}}).is_infinite());
  try {
    eval(parse("x1", 2), Vec{{1.0}});
    FAIL("short point accepted");
  } catch (const EvalError& e) {
    CHECK(e.kind() == EvalErrorKind::DimensionMismatch);
  }
  CHECK(std::isinf(eval_or_inf(parse("1/x0", 1), Vec::Zero(1))));
}

TEST_CASE("parse errors carry the offset") {
  auto offset_of = [](const char* text, int n) -> std::size_t {
    try {
      parse(text, n);
    } catch (const ParseError& e) {
      return e.offset();
    }
    return 999;
  };
  CHECK(offset_of("x0 + ", 1) == 5);
  CHECK(offset_of("x3", 2) == 0);
  CHECK(offset_of("x0 $ 1", 1) == 3);
  CHECK_THROWS_AS(parse("ind(x0 <= 1)", 1), ParseError);
  CHECK_THROWS_AS(parse("x0^(1/0)", 1), ParseError);
  CHECK_THROWS_AS(parse("foo(x0)", 1), ParseError);
  CHECK_THROWS_AS(parse("max()", 1), ParseError);
  CHECK_THROWS_AS(parse("pw((x0 < 0: 1))", 1), ParseError);
}

TEST_CASE("canonical text round-trips") {
  for (const char* text : {"x0^3", "exp(x0*x1)", "-(x0^2 + x1^2)", "abs(x0) - x1/3", "max(x0, -x1, 2.5e-3)",
                           "pw((abs(x0) - 1 <= 0: abs(x0)), default: 1)", "x0 + ind(x1 == 0 && x0 < 0)",
                           "x0^(1/2) + x1^(-2/3)", "pos(x0 - x1)^2", "min(x0, x1)^(3)"}) {
    CAPTURE(text);
    const Expression e = parse(text, 2);
    const std::string canon = to_string(e);
    const Expression back = parse(canon, 2);
    CHECK(structurally_equal(e, back));
    CHECK(to_string(back) == canon);
  }
  CHECK_FALSE(structurally_equal(parse("x0 + x1", 2), parse("x1 + x0", 2)));
}

TEST_CASE("structural queries") {
  CHECK(parse("x0 + x4", 5).max_variable() == 4);
  CHECK(parse("3", 2).max_variable() == -1);
  CHECK(parse("abs(exp(x0))", 1).uses_exp());
  CHECK_FALSE(parse("abs(x0)", 1).uses_exp());
}

TEST_CASE("finite-difference gradients agree with symbolic ones on random polynomials") {
  const oracle::SuiteResult r = oracle::fd_vs_symbolic(1000, 1e-4, 7);
  CAPTURE(r.first_failure);
  CHECK(r.cases == 1000);
  CHECK(r.ok());
}
