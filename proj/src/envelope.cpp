#include "penaltylab/envelope.hpp"

#include <algorithm>
#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

namespace {

constexpr double kShellWidth = 1e-2;

// First crossing of the level ψ = t along b + s·u, located by doubling s and
// bisecting. Empty when ψ stays below t out to the escape radius or jumps
// across the shell.
std::optional<Vec> level_point(const ScalarFn& psi, const Vec& b, const Vec& u, double t, double max_s) {
  double lo = 0.0;
  double hi = 0.0;
  bool bracketed = false;
  for (double s = 1e-9; s <= 2.0 * max_s; s *= 2.0) {
    const double v = psi(b + s * u);
    if (std::isfinite(v) && v >= t) {
      hi = s;
      bracketed = true;
      break;
    }
    lo = s;
  }
  if (!bracketed) return std::nullopt;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec x = b + mid * u;
    const double v = psi(x);
    if (std::abs(v - t) <= 1e-3 * t) return x;
    if (std::isfinite(v) && v >= t) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 1e-15 * hi) break;
  }
  const Vec x = b + hi * u;
  const double v = psi(x);
  if (std::isfinite(v) && std::abs(v - t) <= kShellWidth * t) return x;
  return std::nullopt;
}

std::optional<EnvelopeSample> shell_max(const ScalarFn& phi, const ScalarFn& psi, const Vec& b, double t,
                                        double max_s, const EnvelopeOptions& opt, Rng& rng) {
  const Eigen::Index n = b.size();
  std::optional<EnvelopeSample> best;
  auto consider = [&](const Vec& x) {
    const double v = phi(x);
    if (!std::isfinite(v)) return;
    if (!best || v > best->mu) best = EnvelopeSample{t, v, x};
  };

  std::vector<Vec> starts;
  for (Eigen::Index i = 0; i < n; ++i) {
    starts.push_back(Vec::Unit(n, i));
    starts.push_back(-Vec::Unit(n, i));
  }
  if (n == 1) {
    for (const Vec& u : starts)
      if (auto x = level_point(psi, b, u, t, max_s)) consider(*x);
    return best;
  }
  for (int j = 0; j < opt.starts; ++j) starts.push_back(unit_vector(rng, n));

  PatternOptions po;
  po.lo = Vec::Constant(n, -1.0);
  po.hi = Vec::Constant(n, 1.0);
  po.scale = Vec::Ones(n);
  po.initial_step = 0.25;
  po.min_step = 1e-9;
  po.max_iters = opt.iters;
  auto neg_phi = [&](const Vec& u) {
    const double nu = u.norm();
    if (nu < 1e-9) return kInf;
    const auto x = level_point(psi, b, u / nu, t, max_s);
    if (!x) return kInf;
    const double v = phi(*x);
    return std::isfinite(v) ? -v : kInf;
  };
  for (const Vec& u0 : starts) {
    const PatternResult pr = pattern_search(neg_phi, u0, po, rng);
    if (!std::isfinite(pr.value) || pr.x.norm() < 1e-9) continue;
    if (auto x = level_point(psi, b, pr.x / pr.x.norm(), t, max_s)) consider(*x);
  }
  return best;
}

}  // namespace

LogLogFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw UsageError("log-log fit needs at least two points");
  const Eigen::Index k = static_cast<Eigen::Index>(x.size());
  Mat a(k, 2);
  Vec rhs(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    a(i, 0) = std::log(x[static_cast<std::size_t>(i)]);
    a(i, 1) = 1.0;
    rhs[i] = std::log(y[static_cast<std::size_t>(i)]);
  }
  const Vec coef = a.colPivHouseholderQr().solve(rhs);
  LogLogFit fit;
  fit.slope = coef[0];
  fit.intercept = coef[1];
  fit.rms = std::sqrt((a * coef - rhs).squaredNorm() / static_cast<double>(k));
  return fit;
}

EnvelopeFit fit_envelope(const ScalarFn& phi, const ScalarFn& psi, const SearchDomain& d,
                         const EnvelopeOptions& opt, std::uint64_t seed) {
  d.validate();
  if (opt.t_zero.empty() || opt.t_inf.empty()) throw UsageError("envelope grids must be nonempty");
  for (double t : opt.t_zero)
    if (!(t > 0.0)) throw UsageError("envelope grid values must be positive");
  for (double t : opt.t_inf)
    if (!(t > 0.0)) throw UsageError("envelope grid values must be positive");

  // base point: a minimizer of ψ, ideally on S
  const MinimizeResult base = minimize_unconstrained(psi, d, Budget{8, 300}, derive_seed(seed, 7));
  const Vec b = base.status == MinStatus::Infeasible ? d.center() : base.best_point;
  const double max_s = d.escape_scale + (b - d.center()).norm();

  EnvelopeFit fit;
  auto run_grid = [&](const std::vector<double>& grid, std::vector<EnvelopeSample>& out, std::uint64_t stream) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Rng rng(derive_seed(seed, stream + i));
      auto s = shell_max(phi, psi, b, grid[i], max_s, opt, rng);
      if (s && s->mu > 0.0) {
        out.push_back(*s);
      } else {
        fit.dropped.push_back(grid[i]);
      }
    }
    std::sort(out.begin(), out.end(), [](const EnvelopeSample& a, const EnvelopeSample& c) { return a.t < c.t; });
  };
  run_grid(opt.t_zero, fit.zero, 1000);
  run_grid(opt.t_inf, fit.inf, 2000);

  auto exponent = [](const std::vector<EnvelopeSample>& side, double& rms) -> std::optional<double> {
    if (side.size() < 3) return std::nullopt;
    std::vector<double> ts;
    std::vector<double> mus;
    for (const EnvelopeSample& s : side) {
      ts.push_back(s.t);
      mus.push_back(s.mu);
    }
    const LogLogFit f = loglog_fit(ts, mus);
    rms = f.rms;
    return f.slope;
  };
  fit.alpha_hat = exponent(fit.zero, fit.residual_zero);
  fit.beta_hat = exponent(fit.inf, fit.residual_inf);
  return fit;
}

EnvelopeFit fit_envelope(const Expression& phi, const Expression& psi, const SearchDomain& d,
                         const EnvelopeOptions& opt, std::uint64_t seed) {
  EnvelopeFit fit = fit_envelope(as_function(phi), as_function(psi), d, opt, seed);
  fit.non_semialgebraic = phi.uses_exp() || psi.uses_exp();
  return fit;
}

EnvelopeValidation validate_envelope(const ScalarFn& phi, const ScalarFn& psi, int n, double alpha, double beta,
                                     int samples, double radius, std::uint64_t seed) {
  if (n < 1 || samples < 1 || !(radius > 1e-6)) throw UsageError("validation needs n, samples and a radius above 1e-6");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  EnvelopeValidation out;
  out.samples = samples;
  const double lo = -6.0;
  const double hi = std::log10(radius);
  for (int k = 0; k < samples; ++k) {
    const double r = std::pow(10.0, lo + (hi - lo) * unit(rng));
    const Vec x = r * unit_vector(rng, n);
    const double f = phi(x);
    const double p = psi(x);
    if (!std::isfinite(f) || !std::isfinite(p) || f <= 0.0) continue;
    const double den = p > 0.0 ? std::pow(p, alpha) + std::pow(p, beta) : 0.0;
    const double q = den > 0.0 ? f / den : kInf;
    if (q > out.max_ratio) {
      out.max_ratio = q;
      out.argmax = x;
    }
  }
  return out;
}

SingleExponentVerdict single_exponent_check(const EnvelopeFit& fit, double margin) {
  SingleExponentVerdict v;
  v.impossible = true;
  for (int k = 1; k <= 16; ++k) {
    SingleExponentCheck c;
    c.alpha = 0.125 * k;
    c.unbounded_at_zero = fit.alpha_hat && c.alpha > *fit.alpha_hat + margin;
    c.unbounded_at_inf = fit.beta_hat && c.alpha < *fit.beta_hat - margin;
    if (!c.unbounded_at_zero && !c.unbounded_at_inf) v.impossible = false;
    v.grid.push_back(c);
  }
  return v;
}

}  // namespace penaltylab
