#pragma once

// Independent reference computations used by the tests. Nothing here calls
// the library's solvers; values come from closed forms or brute force.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "penaltylab/cone.hpp"
#include "penaltylab/corpus.hpp"
#include "penaltylab/types.hpp"

namespace oracle {

using penaltylab::Vec;

/// Sum of c * prod x_i^{e_i} with small integer exponents.
struct Polynomial {
  int n = 0;
  std::vector<double> coef;
  std::vector<std::vector<int>> exps;

  std::string text() const;
  double value(const Vec& x) const;
  Vec gradient(const Vec& x) const;
};

Polynomial random_polynomial(std::mt19937_64& rng, int n, int terms, int max_degree);

struct SuiteResult {
  int cases = 0;
  int failures = 0;
  double worst = 0.0;
  std::string first_failure;
  bool ok() const { return cases > 0 && failures == 0; }
};

/// Finite-difference gradient of the parsed polynomial against the exact one,
/// relative tolerance `tol` on points in [-2, 2]^n.
SuiteResult fd_vs_symbolic(int cases, double tol, std::uint64_t seed);

/// Projection onto random product sets against random members of the set:
/// Π(y) ∈ C and ‖y − Π(y)‖ ≤ ‖y − z‖ for every sampled z.
SuiteResult projection_optimality(int cases, std::uint64_t seed);

/// Every corpus expression prints to text that parses back to an identical
/// tree with identical values at random points; every file round-trips.
SuiteResult corpus_round_trip(const std::string& corpus_dir, std::uint64_t seed);

/// Cross-checks between certificate, ratio threshold, calmness and envelope
/// results over the whole corpus (see the test for the list).
SuiteResult certifier_consistency(const std::string& corpus_dir);

/// Runs the corpus twice and compares the CSV and JSON reports byte for byte.
SuiteResult report_determinism(const std::string& corpus_dir);

/// sup { x0² + x1² : x0² + x1⁴ = t }.
double vd41_envelope(double t);

/// inf { exp(x0 x1) : x0 = u, |x1| ≤ h }.
double ex4ii_value(double u, double half_width);

/// min over λ on a fine grid and w = ±1 of ‖λ∇f + (1 − λ) w ∇g‖ at (1/k, −k)
/// for f = exp(x0 x1), g = x0.
double ex4ii_nu(double k);

/// sup over a dense grid on [−R, 0) of [0 − x]+ / ψ(x)^α for the clipped
/// residual ψ = min(|x|, 1).
double vd42ii_ratio(double alpha, double radius);

}  // namespace oracle
