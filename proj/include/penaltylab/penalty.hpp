#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "penaltylab/cone.hpp"
#include "penaltylab/expression.hpp"

namespace penaltylab {

enum class ResidualKind { DistToCone, MaxPlus, Custom };

/// A residual function ψ for a feasible set: nonnegative, zero exactly on S.
struct ResidualSpec {
  ResidualKind kind = ResidualKind::Custom;
  ConeForm cone;                 // DistToCone
  std::vector<Expression> g;     // MaxPlus: max{g_1, …, g_m, 0}
  Expression psi;                // Custom

  static ResidualSpec dist_to_cone(ConeForm s);
  static ResidualSpec max_plus(std::vector<Expression> g);
  static ResidualSpec custom(Expression psi);
};

/// DistToCone for cone-form sets, the declared ψ for residual-form sets.
ResidualSpec default_residual(const FeasibleSet& s);

/// Custom values in [−1e-12, 0) are clamped to 0; anything lower throws
/// EvalError(NegativeResidual). Other evaluation errors propagate.
ExtReal residual_eval(const ResidualSpec& r, const Vec& x);

/// residual_eval with evaluation failures mapped to +∞. A NegativeResidual
/// still throws, since it means the residual itself is malformed.
double residual_or_inf(const ResidualSpec& r, const Vec& x);

enum class PenaltyForm { Plain, Power, TwoPower, CurvatureWeighted };

struct PenaltySpec {
  PenaltyForm form = PenaltyForm::Plain;
  double c = 1.0;
  double alpha = 1.0;
  double beta = 1.0;

  static PenaltySpec plain(double c);
  static PenaltySpec power(double c, double alpha);
  static PenaltySpec two_power(double c, double alpha, double beta);
  static PenaltySpec curvature(double c, double alpha);

  /// c > 0 finite, α ∈ (0,1], β ≥ 1. Throws UsageError.
  void validate() const;
  PenaltySpec with_c(double value) const;
};

/// `plain(c) | power(c,alpha) | twopower(c,alpha,beta) | curvature(c,alpha)`.
PenaltySpec parse_penalty(std::string_view text);
std::string to_string(const PenaltySpec& p);
std::string form_name(PenaltyForm form);

/// The bracket multiplied by c: ψ, ψ^α, ψ^α + ψ^β, or (1 + f²)ψ^α.
/// ψ^α at ψ = 0 is 0; +∞ in either argument gives +∞.
double effective_residual(const PenaltySpec& p, double f, double psi);

ExtReal penalized_eval(const Expression& f, const PenaltySpec& p, const ResidualSpec& r, const Vec& x);

/// Penalized objective for the solvers; evaluation failures become +∞.
ScalarFn penalized_function(const Expression& f, const PenaltySpec& p, const ResidualSpec& r);

}  // namespace penaltylab
