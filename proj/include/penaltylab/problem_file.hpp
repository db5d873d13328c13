#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "penaltylab/problem.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

/// One `expect.<command>[.<case>].<field> = <matcher>` line.
struct Expectation {
  std::string command;
  std::string case_name;  // empty when the key has no case segment
  std::string field;
  std::string matcher;
};

/// Parameters of one `run.<command>.<case>.<param> = value` group.
using RunParams = std::map<std::string, std::string>;

/// A parsed problem file: the problem plus default budgets, optional extra
/// functions, and the self-verifying expectations of the corpus.
struct ProblemFile {
  Problem problem;
  std::optional<Expression> phi;
  /// Curves x(s) tried first by the K∞ probe, one expression per coordinate.
  std::vector<std::vector<Expression>> kinf_paths;
  Budget budget;
  int samples = 100000;
  std::uint64_t seed = 1;
  /// Keyed by "<command>.<case>".
  std::map<std::string, RunParams> runs;
  std::vector<Expectation> expectations;
};

/// Line-oriented `key = value` text; '#' starts a comment line. Errors carry
/// the line number and, for expressions, the offset within the value.
ProblemFile parse_problem_file(const std::string& text);
ProblemFile load_problem_file(const std::string& path);

/// Canonical text; parse_problem_file(format_problem_file(f)) reproduces f.
std::string format_problem_file(const ProblemFile& f);
void save_problem_file(const ProblemFile& f, const std::string& path);

/// Field-by-field equality with structural comparison of expressions.
bool equivalent(const ProblemFile& a, const ProblemFile& b);

/// Every expression in the file (objective, constraints, residual, phi, paths).
std::vector<std::pair<std::string, Expression>> expressions_of(const ProblemFile& f);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

/// Parses "a" or "a/b" with a, b decimal reals (also inf, -inf).
double parse_real(const std::string& text);

/// Comma-separated reals, optionally wrapped in parentheses.
Vec parse_point(const std::string& text);

}  // namespace penaltylab
