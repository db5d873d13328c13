#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "penaltylab/penalty.hpp"
#include "penaltylab/problem.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

inline constexpr double kRatioUnbounded = 1e6;
inline constexpr double kResidualFloor = 1e-8;

enum class CStarStatus { Finite, Unbounded, Inconclusive };

std::string to_string(CStarStatus s);

/// Sampled supremum of [f* − f]+ / ψ_eff over points with ψ > 1e-8.
struct CStarEstimate {
  CStarStatus status = CStarStatus::Inconclusive;
  double value = 0.0;
  Vec witness;
  /// Accepted iterates of the refinement run that produced the maximum.
  std::vector<Vec> path;
  int samples = 0;
};

struct CStarOptions {
  int samples = 100000;
  int refine_from = 32;
  int refine_iters = 400;
};

/// Samples half the budget from the box (shifted Halton) and half on
/// log-uniform radii 1e-6 … escape_scale around the box center, then
/// maximizes the ratio locally from the best `refine_from` samples inside the
/// escape cube. The ratio uses the effective residual of `form` (plain ψ for
/// the plain threshold); `form.c` is ignored. A maximum found with ψ within
/// 10× of the 1e-8 floor, and more than 1% above the ratio where the
/// refinement path last had ψ ≥ 1e-7 (or at its start), is reported
/// Inconclusive with its value kept.
CStarEstimate estimate_cstar(const Problem& p, const ResidualSpec& r, const PenaltySpec& form, double fstar,
                             const CStarOptions& opt, std::uint64_t seed);

enum class CertStatus { CertifiedExactOnDomain, CounterexampleFound, UnboundedPenalized, Inconclusive };

std::string to_string(CertStatus s);

struct Certificate {
  CertStatus status = CertStatus::Inconclusive;
  double fstar = 0.0;
  Vec fstar_point;
  MinimizeResult penalized;
  CStarEstimate cstar;
  std::optional<Vec> witness;
  /// penalized_minimizer | ratio | feasible_minimizer (boundary case c ≈ c*).
  std::string witness_kind;
  /// Whether the argmin transfer check ran (only for c clearly above ĉ).
  bool argmin_checked = false;
  SearchDomain domain;
};

struct CertifyOptions {
  Budget budget;
  double tol = 1e-6;
  CStarOptions cstar;
};

/// Compares inf_S f with the penalized infimum and runs the ratio test
/// against c. Throws InfeasibleError when S is not found in the box.
Certificate certify_exactness(const Problem& p, const PenaltySpec& pen, const ResidualSpec& r,
                              const CertifyOptions& opt, std::uint64_t seed);

}  // namespace penaltylab
