#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "penaltylab/problem.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

struct EnvelopeSample {
  double t = 0.0;
  double mu = 0.0;
  Vec argmax;
};

/// μ̂(t) = max φ over the level set ψ = t, sampled on two grids.
struct EnvelopeFit {
  std::vector<EnvelopeSample> zero;   // t ascending, from the grid toward 0
  std::vector<EnvelopeSample> inf;    // t ascending, from the grid toward ∞
  std::vector<double> dropped;        // grid values ψ never reached
  std::optional<double> alpha_hat;
  std::optional<double> beta_hat;
  double residual_zero = 0.0;         // RMS of the log-log fit
  double residual_inf = 0.0;
  /// Set when φ or ψ uses exp(); the monomial asymptotics are then unproven.
  bool non_semialgebraic = false;
};

struct EnvelopeOptions {
  std::vector<double> t_zero{1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7};
  std::vector<double> t_inf{1e2, 1e3, 1e4, 1e5, 1e6};
  int starts = 12;
  int iters = 300;
};

/// For each t the level set is reached by bisection along rays from a
/// minimizer b of ψ; φ is then maximized over ray directions. Rays are
/// followed out to escape_scale. Fewer than three usable t on a side leave
/// that exponent empty.
EnvelopeFit fit_envelope(const ScalarFn& phi, const ScalarFn& psi, const SearchDomain& d,
                         const EnvelopeOptions& opt, std::uint64_t seed);
EnvelopeFit fit_envelope(const Expression& phi, const Expression& psi, const SearchDomain& d,
                         const EnvelopeOptions& opt, std::uint64_t seed);

/// OLS slope and RMS residual of log y against log x.
struct LogLogFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms = 0.0;
};
LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y);

struct EnvelopeValidation {
  double max_ratio = 0.0;   // max φ / (ψ^α + ψ^β) over the sample
  Vec argmax;
  int samples = 0;
};

/// Samples log-uniform radii in [1e-6, radius] around the origin of R^n.
EnvelopeValidation validate_envelope(const ScalarFn& phi, const ScalarFn& psi, int n, double alpha, double beta,
                                     int samples, double radius, std::uint64_t seed);

/// For every α on the grid: does φ/ψ^α blow up at 0 (α > α̂) or at ∞ (α < β̂)?
struct SingleExponentCheck {
  double alpha = 0.0;
  bool unbounded_at_zero = false;
  bool unbounded_at_inf = false;
};
struct SingleExponentVerdict {
  std::vector<SingleExponentCheck> grid;
  /// Every grid α fails at one end, so no φ ≤ c ψ^α bound exists.
  bool impossible = false;
};
SingleExponentVerdict single_exponent_check(const EnvelopeFit& fit, double margin = 0.05);

}  // namespace penaltylab
