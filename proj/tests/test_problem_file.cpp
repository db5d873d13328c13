#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "penaltylab/errors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace penaltylab;

namespace {

std::size_t error_line(const std::string& text) {
  try {
    parse_problem_file(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

const char* kHead = "name = p\nn = 2\nobjective = x0 + x1\n";

}  // namespace

TEST_CASE("a cone-form corpus file") {
  const ProblemFile f = fixture::corpus("ex4iii");
  CHECK(f.problem.name == "ex4iii");
  CHECK(f.problem.n == 2);
  const auto& cf = std::get<ConeForm>(f.problem.feasible);
  REQUIRE(cf.g.size() == 1);
  CHECK(cf.cone.factors[0] == ConeFactor::zero());
  CHECK(f.problem.domain.lo == Vec::Constant(2, -10.0));
  CHECK(f.problem.domain.escape_scale == 1e3);
  CHECK(f.runs.at("certify.c15").at("penalty") == "plain(1.5)");
  CHECK(f.runs.at("mfcq.origin").at("at") == "0, 0");
  bool found = false;
  for (const Expectation& x : f.expectations)
    if (x.command == "certify" && x.case_name == "c05" && x.field == "witness_kind") found = x.matcher == "ratio";
  CHECK(found);
}

TEST_CASE("a residual-form corpus file with a comparison function") {
  const ProblemFile f = fixture::corpus("vd41");
  CHECK(std::holds_alternative<ResidualForm>(f.problem.feasible));
  REQUIRE(f.phi);
  CHECK(eval(*f.phi, Vec{{1.0, 2.0}}).value() == doctest::Approx(5.0));
}

TEST_CASE("defaults and overrides") {
  const ProblemFile f = parse_problem_file(std::string(kHead) +
                                           "constraint.0.expr = x0\nconstraint.0.cone = nonneg\n"
                                           "box.lo = -1, -2\nbox.hi = 3\nescape_scale = 1e4\nseed = 9\n"
                                           "budget.starts = 3\nbudget.iters = 50\nbudget.samples = 77\n");
  CHECK(f.problem.domain.lo == Vec{{-1.0, -2.0}});
  CHECK(f.problem.domain.hi == Vec{{3.0, 3.0}});
  CHECK(f.seed == 9);
  CHECK(f.budget.starts == 3);
  CHECK(f.budget.iters == 50);
  CHECK(f.samples == 77);
  const ProblemFile d = parse_problem_file(std::string(kHead) + "constraint.0.expr = x0\nconstraint.0.cone = zero\n");
  CHECK(d.problem.domain.hi == Vec::Constant(2, 10.0));
  CHECK(d.samples == 100000);
}

TEST_CASE("errors name the offending line") {
  CHECK(error_line(std::string(kHead) + "constraint.0.expr = x0 +\nconstraint.0.cone = zero\n") == 4);
  CHECK(error_line(std::string(kHead) + "constraint.0.expr = x0\nconstraint.0.cone = interval(2,1)\n") == 5);
  CHECK(error_line(std::string(kHead) + "colour = red\n") == 4);
  CHECK(error_line(std::string(kHead) + "residual = x0^2\nresidual = x1^2\n") == 5);
  CHECK(error_line("name = p\nn = 2\nobjective = x0 + x5\nresidual = x0^2\n") == 3);
  CHECK(error_line("name = p\nn = 2\nobjective = x0\nthis line has no equals sign\n") == 4);
  CHECK_THROWS_AS(parse_problem_file(std::string(kHead) + "constraint.1.expr = x0\nconstraint.1.cone = zero\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_problem_file(std::string(kHead) + "residual = x0^2\nconstraint.0.expr = x0\n"
                                                          "constraint.0.cone = zero\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_problem_file(std::string(kHead)), ParseError);
  CHECK_THROWS_AS(load_problem_file("/nonexistent/file.problem"), Error);
}

TEST_CASE("empty interval surfaces as a parse error mentioning the cause") {
  CHECK_THROWS_WITH_AS(parse_problem_file(std::string(kHead) +
                                          "constraint.0.expr = x0\nconstraint.0.cone = interval(2,1)\n"),
                       doctest::Contains("EmptyInterval"), ParseError);
}

TEST_CASE("numbers and points") {
  CHECK(parse_real("1/2") == 0.5);
  CHECK(parse_real("-1e-3") == -1e-3);
  CHECK(std::isinf(parse_real("inf")));
  CHECK_THROWS_AS(parse_real("abc"), ParseError);
  CHECK_THROWS_AS(parse_real("1/0"), ParseError);
  CHECK(parse_point("(1, -2.5)") == Vec{{1.0, -2.5}});
  CHECK(parse_point("1/32, -32") == Vec{{1.0 / 32, -32.0}});
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -7.25e12, 2.0}) CHECK(parse_real(format_real(v)) == v);
}

TEST_CASE("canonical text round-trips every corpus file") {
  for (const std::string& path : corpus_files(PENALTYLAB_CORPUS_DIR)) {
    CAPTURE(path);
    const ProblemFile a = load_problem_file(path);
    const std::string text = format_problem_file(a);
    const ProblemFile b = parse_problem_file(text);
    CHECK(equivalent(a, b));
    CHECK(format_problem_file(b) == text);
  }
  const oracle::SuiteResult r = oracle::corpus_round_trip(PENALTYLAB_CORPUS_DIR, 3);
  CAPTURE(r.first_failure);
  CHECK(r.ok());
}

TEST_CASE("saving and loading") {
  const auto path = std::filesystem::temp_directory_path() / "penaltylab_roundtrip.problem";
  const ProblemFile a = fixture::corpus("ex4ii");
  save_problem_file(a, path.string());
  CHECK(equivalent(load_problem_file(path.string()), a));
  std::filesystem::remove(path);
}

TEST_CASE("expression inventory") {
  const auto exprs = expressions_of(fixture::corpus("ex4ii"));
  std::vector<std::string> names;
  for (const auto& [name, e] : exprs) names.push_back(name);
  CHECK(names == std::vector<std::string>{"objective", "constraint.0", "kinf.path.0.0", "kinf.path.0.1"});
}
