#include <doctest.h>

#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/problem.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/solver.hpp"

using namespace penaltylab;

namespace {

Problem cone_problem(const char* objective, const char* g, ConeFactor factor, int n, double hw = 10.0) {
  Problem p;
  p.name = "t";
  p.n = n;
  p.objective = parse(objective, n);
  p.feasible = ConeForm{{parse(g, n)}, ConeSet{{factor}}};
  p.domain = SearchDomain::cube(n, hw);
  return p;
}

}  // namespace

TEST_CASE("search domains validate their shape") {
  CHECK_NOTHROW(SearchDomain::cube(2, 10.0).validate());
  CHECK_THROWS_AS(SearchDomain::cube(2, 10.0, 5.0).validate(), UsageError);
  SearchDomain d = SearchDomain::cube(1, 1.0);
  d.lo[0] = 2.0;
  CHECK_THROWS_AS(d.validate(), UsageError);
}

TEST_CASE("pattern search finds a shifted quadratic minimum") {
  const SearchDomain d = SearchDomain::cube(3, 10.0);
  const ScalarFn f = [](const Vec& x) { return (x - Vec{{1.0, -2.0, 3.0}}).squaredNorm(); };
  Rng rng(1);
  const PatternResult r = pattern_search(f, d.center(), box_options(d, 400), rng);
  CHECK(r.value < 1e-10);
}

TEST_CASE("multistart minimization: finite, unbounded, deterministic") {
  const SearchDomain d = SearchDomain::cube(2, 10.0);
  const ScalarFn quad = [](const Vec& x) { return std::pow(x[0] - 3, 2) + std::abs(x[1] + 1) + 2; };
  const MinimizeResult a = minimize_unconstrained(quad, d, {8, 400}, 5);
  CHECK(a.status == MinStatus::Finite);
  CHECK(a.best_value == doctest::Approx(2.0).epsilon(1e-8));
  const MinimizeResult b = minimize_unconstrained(quad, d, {8, 400}, 5);
  CHECK(a.best_point == b.best_point);
  CHECK(a.best_value == b.best_value);

  const ScalarFn cubic = [](const Vec& x) { return x[0] * x[0] * x[0]; };
  const MinimizeResult u = minimize_unconstrained(cubic, d, {4, 200}, 5);
  CHECK(u.status == MinStatus::Unbounded);
  CHECK(u.best_value < -1e6);
  CHECK(u.best_point.lpNorm<Eigen::Infinity>() <= d.escape_scale);
  CHECK_THROWS_AS(minimize_unconstrained(quad, d, {0, 10}, 5), UsageError);
}

TEST_CASE("a larger start budget never does worse") {
  const SearchDomain d = SearchDomain::cube(2, 5.0);
  // many local minima
  const ScalarFn f = [](const Vec& x) { return std::sin(3 * x[0]) * std::cos(2 * x[1]) + 0.05 * x.squaredNorm(); };
  double prev = kInf;
  for (int starts : {1, 2, 4, 8, 16}) {
    const MinimizeResult r = minimize_unconstrained(f, d, {starts, 200}, 3);
    CHECK(r.best_value <= prev);
    prev = r.best_value;
  }
}

TEST_CASE("restoration reaches the feasible set") {
  const Problem p = cone_problem("x0", "x0^2 + x1^2 - 4", ConeFactor::zero(), 2);
  const RestoreResult r = restore(p.feasible, Vec{{0.3, 0.1}}, p.domain);
  CHECK(r.residual <= 1e-10);
  CHECK(r.x.norm() == doctest::Approx(2.0).epsilon(1e-8));
  const FeasibleSet degenerate = ResidualForm{parse("x0^4", 1)};
  const RestoreResult q = restore(degenerate, Vec{{1.0}}, SearchDomain::cube(1, 10.0));
  CHECK(q.residual <= 1e-8);
}

TEST_CASE("feasible minimization on a circle and on a half-line") {
  const Problem circle = cone_problem("x0 + x1", "x0^2 + x1^2 - 2", ConeFactor::zero(), 2);
  const MinimizeResult r = minimize_feasible(circle, {16, 400}, 1);
  CHECK(r.status == MinStatus::Finite);
  CHECK(r.best_value == doctest::Approx(-2.0).epsilon(1e-6));
  CHECK(feasibility_residual(circle.feasible, r.best_point) <= 1e-6);

  const Problem half = cone_problem("(x0 - 5)^2", "x0 - 1", ConeFactor::nonpos(), 1);
  const MinimizeResult h = minimize_feasible(half, {8, 300}, 1);
  CHECK(h.best_value == doctest::Approx(16.0).epsilon(1e-6));
}

TEST_CASE("no feasible point in the box") {
  const Problem p = cone_problem("x0", "x0^2 + 1", ConeFactor::zero(), 1);
  CHECK(minimize_feasible(p, {4, 100}, 1).status == MinStatus::Infeasible);
}

TEST_CASE("minimization on spheres") {
  Rng rng(2);
  const ScalarFn f = [](const Vec& x) { return x[0] + 2 * x[1]; };
  const PatternResult r = minimize_on_sphere(f, Vec::Zero(2), 10.0, 4, 300, rng);
  CHECK(r.x.norm() == doctest::Approx(10.0));
  CHECK(r.value == doctest::Approx(-10.0 * std::sqrt(5.0)).epsilon(1e-6));
  const PatternResult one = minimize_on_sphere([](const Vec& x) { return x[0]; }, Vec::Zero(1), 3.0, 0, 10, rng);
  CHECK(one.x[0] == -3.0);
}
