#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "penaltylab/cone.hpp"
#include "penaltylab/problem.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

inline constexpr double kUnboundedThreshold = -1e6;
inline constexpr double kTightFeasibleTol = 1e-14;
inline constexpr double kFeasibleTol = 1e-8;
inline constexpr double kRelaxedFeasibleTol = 1e-4;

struct Budget {
  int starts = 16;
  int iters = 400;
};

enum class MinStatus { Finite, Unbounded, Infeasible };

std::string to_string(MinStatus s);

struct MinimizeResult {
  MinStatus status = MinStatus::Infeasible;
  /// Objective at best_point. For Unbounded this is the value at the witness.
  double best_value = kInf;
  Vec best_point;
  int starts_used = 0;
  std::uint64_t seed = 0;
  int best_start = -1;
};

// ------------------------------------------------------------ local search

struct PatternOptions {
  Vec lo;
  Vec hi;
  /// Per-coordinate length multiplying the relative step.
  Vec scale;
  double initial_step = 0.25;
  double min_step = 1e-13;
  int max_iters = 400;
  /// Stop as soon as a value below this is seen.
  double stop_below = -kInf;
  /// Poll a fresh random orthonormal basis on top of the coordinate axes.
  bool random_directions = true;
  /// Called with every accepted iterate (including the start).
  std::function<void(const Vec&, double)> on_accept;
};

struct PatternResult {
  Vec x;
  double value = kInf;
  int iters = 0;
  bool stopped_below = false;
};

/// Derivative-free minimization: polls ± coordinate (and random) directions,
/// expands along an improving direction, and halves the step on failure.
/// Trial points are clamped to [lo, hi]; +∞ values are simply rejected.
PatternResult pattern_search(const ScalarFn& f, const Vec& x0, const PatternOptions& opt, Rng& rng);

/// PatternOptions covering the domain box with steps relative to its half-widths.
PatternOptions box_options(const SearchDomain& d, int iters);

// ------------------------------------------------------------ restoration

struct RestoreResult {
  Vec x;
  double residual = kInf;
};

/// Drives the feasibility residual toward zero from x: Gauss–Newton on
/// g − Π_C(g) (or on ψ) with finite-difference Jacobians and backtracking,
/// falling back to pattern search on the residual. Points stay in the box.
RestoreResult restore(const FeasibleSet& s, const Vec& x, const SearchDomain& d, int iters = 100);

// ------------------------------------------------------------ global solvers

/// Multistart minimization over the box (center plus nested Halton starts),
/// with ray probes out to escape_scale from every local result. Any value
/// below −1e6 makes the result Unbounded with that point as witness.
MinimizeResult minimize_unconstrained(const ScalarFn& f, const SearchDomain& d, const Budget& b,
                                      std::uint64_t seed);

/// Estimates inf_S f. Each start is restored onto S, then a pattern search
/// runs on x ↦ f(restore(x)), accepting only points whose residual stays in
/// the tier (1e-14, 1e-8, 1e-4) the start reached. The best value of the
/// tightest populated tier wins; Infeasible when no start gets below 1e-4.
MinimizeResult minimize_feasible(const Problem& p, const Budget& b, std::uint64_t seed);

/// Minimizes f over the sphere ‖x − center‖ = radius by pattern search on an
/// unnormalized direction, started from ± axes and `extra_starts` random
/// directions. For n = 1 the two points are evaluated directly.
PatternResult minimize_on_sphere(const ScalarFn& f, const Vec& center, double radius, int extra_starts,
                                 int iters, Rng& rng);

/// Start point k of the nested multistart design.
Vec start_point(const SearchDomain& d, int k, const Vec& shift);

}  // namespace penaltylab
