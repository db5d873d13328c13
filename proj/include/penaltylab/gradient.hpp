#pragma once

#include <cstdint>
#include <vector>

#include "penaltylab/expression.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

inline constexpr double kDefaultFdStep = 1e-6;

/// Central-difference gradient. When exactly one arm of coordinate i is +∞
/// the one-sided quotient against f(x) is used instead.
/// Throws EvalError(NonFinite) when no usable stencil exists.
Vec fd_gradient(const ScalarFn& f, const Vec& x, double h = kDefaultFdStep);
Vec fd_gradient(const Expression& e, const Vec& x, double h = kDefaultFdStep);

/// Row i is the finite-difference gradient of components[i].
Mat fd_jacobian(const std::vector<ScalarFn>& components, const Vec& x, double h = kDefaultFdStep);

/// Finite-difference gradients at points drawn uniformly from the ball of
/// the given radius around `center`; a stand-in for the limiting
/// subdifferential of a locally Lipschitz function.
struct GradientCloud {
  Vec center;
  std::vector<Vec> samples;
  double radius = 0.0;
  std::uint64_t seed = 0;
};

struct CloudOptions {
  double radius = 1e-5;
  int count = 16;
  std::uint64_t seed = 0;
  /// Finite-difference step; 0 selects min(1e-6, radius / 100).
  double step = 0.0;
};

double cloud_step(const CloudOptions& opt);

/// Draws `opt.count` valid gradients, discarding perturbed points whose
/// stencil is not finite and giving up after 10 × count attempts
/// (EvalError). The first k samples do not depend on `count`.
GradientCloud sample_subgradients(const ScalarFn& f, const Vec& x, const CloudOptions& opt);
GradientCloud sample_subgradients(const Expression& e, const Vec& x, const CloudOptions& opt);

/// Jacobians of a vector map at the same kind of perturbed points. Used to
/// form clouds of every scalarization <w, g> from one set of samples.
std::vector<Mat> sample_jacobians(const std::vector<ScalarFn>& components, const Vec& x,
                                  const CloudOptions& opt);

}  // namespace penaltylab
