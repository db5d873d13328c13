#include "penaltylab/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "penaltylab/random.hpp"

namespace penaltylab {

Vec fd_gradient(const ScalarFn& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw UsageError("finite-difference step must be positive");
  const Eigen::Index n = x.size();
  Vec grad(n);
  Vec probe = x;
  double center = kInf;
  bool center_known = false;
  for (Eigen::Index i = 0; i < n; ++i) {
    probe[i] = x[i] + h;
    const double fp = f(probe);
    probe[i] = x[i] - h;
    const double fm = f(probe);
    probe[i] = x[i];
    if (std::isfinite(fp) && std::isfinite(fm)) {
      grad[i] = (fp - fm) / (2.0 * h);
      continue;
    }
    if (!center_known) {
      center = f(x);
      center_known = true;
    }
    if (!std::isfinite(center) || (!std::isfinite(fp) && !std::isfinite(fm)))
      throw EvalError(EvalErrorKind::NonFinite, "finite-difference stencil is not finite");
    grad[i] = std::isfinite(fp) ? (fp - center) / h : (center - fm) / h;
  }
  if (!grad.allFinite()) throw EvalError(EvalErrorKind::NonFinite, "non-finite gradient");
  return grad;
}

Vec fd_gradient(const Expression& e, const Vec& x, double h) { return fd_gradient(as_function(e), x, h); }

Mat fd_jacobian(const std::vector<ScalarFn>& components, const Vec& x, double h) {
  Mat jac(static_cast<Eigen::Index>(components.size()), x.size());
  for (std::size_t i = 0; i < components.size(); ++i)
    jac.row(static_cast<Eigen::Index>(i)) = fd_gradient(components[i], x, h).transpose();
  return jac;
}

double cloud_step(const CloudOptions& opt) {
  return opt.step > 0.0 ? opt.step : std::min(kDefaultFdStep, opt.radius / 100.0);
}

namespace {

template <class Sample, class Out>
void draw_cloud(const Vec& x, const CloudOptions& opt, Sample&& sample, std::vector<Out>& out) {
  if (opt.count < 1) throw UsageError("cloud count must be at least 1");
  if (!(opt.radius > 0.0)) throw UsageError("cloud radius must be positive");
  Rng rng(opt.seed);
  const int budget = 10 * opt.count;
  for (int attempt = 0; attempt < budget && static_cast<int>(out.size()) < opt.count; ++attempt) {
    const Vec point = x + uniform_in_ball(rng, x.size(), opt.radius);
    try {
      out.push_back(sample(point));
    } catch (const EvalError&) {
      // stencil touched +inf; draw again
    }
  }
  if (static_cast<int>(out.size()) < opt.count)
    throw EvalError(EvalErrorKind::NonFinite, "too few finite gradient samples in the ball");
}

}  // namespace

GradientCloud sample_subgradients(const ScalarFn& f, const Vec& x, const CloudOptions& opt) {
  GradientCloud cloud{x, {}, opt.radius, opt.seed};
  const double h = cloud_step(opt);
  draw_cloud(x, opt, [&](const Vec& p) { return fd_gradient(f, p, h); }, cloud.samples);
  return cloud;
}

GradientCloud sample_subgradients(const Expression& e, const Vec& x, const CloudOptions& opt) {
  return sample_subgradients(as_function(e), x, opt);
}

std::vector<Mat> sample_jacobians(const std::vector<ScalarFn>& components, const Vec& x,
                                  const CloudOptions& opt) {
  std::vector<Mat> out;
  const double h = cloud_step(opt);
  draw_cloud(x, opt, [&](const Vec& p) { return fd_jacobian(components, p, h); }, out);
  return out;
}

}  // namespace penaltylab
