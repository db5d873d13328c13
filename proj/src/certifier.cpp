#include "penaltylab/certifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "penaltylab/errors.hpp"
#include "penaltylab/random.hpp"

namespace penaltylab {

std::string to_string(CStarStatus s) {
  switch (s) {
    case CStarStatus::Finite: return "Finite";
    case CStarStatus::Unbounded: return "Unbounded";
    case CStarStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::CertifiedExactOnDomain: return "CertifiedExactOnDomain";
    case CertStatus::CounterexampleFound: return "CounterexampleFound";
    case CertStatus::UnboundedPenalized: return "UnboundedPenalized";
    case CertStatus::Inconclusive: return "Inconclusive";
  }
  return "?";
}

namespace {

// Ratio [f* − f]+ / ψ_eff, or −1 where it is undefined (ψ ≤ floor, f = ∞).
double ratio_at(const Problem& p, const ResidualSpec& r, const PenaltySpec& form, double fstar, const Vec& x) {
  const double f = eval_or_inf(p.objective, x);
  if (!std::isfinite(f)) return -1.0;
  const double psi = residual_or_inf(r, x);
  if (!(psi > kResidualFloor) || !std::isfinite(psi)) return -1.0;
  const double eff = effective_residual(form, f, psi);
  if (!(eff > 0.0) || !std::isfinite(eff)) return -1.0;
  return std::max(fstar - f, 0.0) / eff;
}

}  // namespace

CStarEstimate estimate_cstar(const Problem& p, const ResidualSpec& r, const PenaltySpec& form, double fstar,
                             const CStarOptions& opt, std::uint64_t seed) {
  validate(p);
  if (!std::isfinite(fstar)) throw UsageError("estimate_cstar needs a finite fstar");
  if (opt.samples < 2) throw UsageError("need at least two ratio samples");
  const SearchDomain& d = p.domain;
  const Eigen::Index n = d.dim();
  const Vec center = d.center();

  const int half = opt.samples / 2;
  const Vec shift = halton_shift(derive_seed(seed, 1), n);
  Rng rng(derive_seed(seed, 2));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double log_lo = -6.0;
  const double log_hi = std::log10(d.escape_scale);

  std::vector<Vec> points;
  std::vector<double> ratios;
  points.reserve(static_cast<std::size_t>(opt.samples));
  ratios.reserve(static_cast<std::size_t>(opt.samples));
  for (int k = 0; k < opt.samples; ++k) {
    Vec x;
    if (k < half) {
      x = d.lo + halton_point(static_cast<std::uint64_t>(k), n, shift).cwiseProduct(d.hi - d.lo);
    } else {
      const double radius = std::pow(10.0, log_lo + (log_hi - log_lo) * unit(rng));
      x = center + radius * unit_vector(rng, n);
    }
    ratios.push_back(ratio_at(p, r, form, fstar, x));
    points.push_back(std::move(x));
  }

  CStarEstimate est;
  est.samples = opt.samples;
  std::vector<int> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return ratios[a] > ratios[b]; });
  if (order.empty() || ratios[order[0]] < 0.0) return est;  // nothing off S

  est.status = CStarStatus::Finite;
  est.value = ratios[order[0]];
  est.witness = points[order[0]];
  est.path = {est.witness};

  PatternOptions po;
  po.lo = center.array() - d.escape_scale;
  po.hi = center.array() + d.escape_scale;
  po.max_iters = opt.refine_iters;
  po.min_step = 1e-10;
  po.stop_below = -kRatioUnbounded;
  auto neg_ratio = [&](const Vec& x) {
    const double q = ratio_at(p, r, form, fstar, x);
    return q < 0.0 ? kInf : -q;
  };
  const int refine = std::min<int>(opt.refine_from, static_cast<int>(order.size()));
  for (int j = 0; j < refine; ++j) {
    const int idx = order[static_cast<std::size_t>(j)];
    if (ratios[idx] < 0.0) break;
    std::vector<Vec> path;
    po.scale = points[idx].cwiseAbs().cwiseMax(1.0);
    po.on_accept = [&](const Vec& x, double) { path.push_back(x); };
    Rng local(derive_seed(seed, 100 + static_cast<std::uint64_t>(j)));
    const PatternResult pr = pattern_search(neg_ratio, points[idx], po, local);
    const double q = -pr.value;
    if (q > est.value) {
      est.value = q;
      est.witness = pr.x;
      est.path = std::move(path);
    }
    if (est.value > kRatioUnbounded) {
      est.status = CStarStatus::Unbounded;
      break;
    }
  }
  if (est.value > kRatioUnbounded) {
    est.status = CStarStatus::Unbounded;
  } else if (residual_or_inf(r, est.witness) <= 10.0 * kResidualFloor) {
    // the maximum sits on the sampling floor: unresolved if the ratio was
    // still climbing since the path last had ψ ≥ 10 × floor (or since its start)
    const Vec* ref = est.path.empty() ? nullptr : &est.path.front();
    for (auto it = est.path.rbegin(); it != est.path.rend(); ++it) {
      if (residual_or_inf(r, *it) >= 10.0 * kResidualFloor) {
        ref = &*it;
        break;
      }
    }
    if (ref && est.value > 1.01 * ratio_at(p, r, form, fstar, *ref)) est.status = CStarStatus::Inconclusive;
  }
  return est;
}

Certificate certify_exactness(const Problem& p, const PenaltySpec& pen, const ResidualSpec& r,
                              const CertifyOptions& opt, std::uint64_t seed) {
  validate(p);
  pen.validate();
  Certificate cert;
  cert.domain = p.domain;

  const MinimizeResult feas = minimize_feasible(p, opt.budget, seed);
  if (feas.status == MinStatus::Infeasible) throw InfeasibleError("no feasible point found in the box");
  if (feas.status == MinStatus::Unbounded) throw UsageError("objective is unbounded below on S");
  cert.fstar = feas.best_value;
  cert.fstar_point = feas.best_point;

  cert.penalized = minimize_unconstrained(penalized_function(p.objective, pen, r), p.domain, opt.budget, seed);
  if (cert.penalized.status == MinStatus::Unbounded) {
    cert.status = CertStatus::UnboundedPenalized;
    cert.witness = cert.penalized.best_point;
    cert.witness_kind = "penalized_minimizer";
    return cert;
  }

  cert.cstar = estimate_cstar(p, r, pen, cert.fstar, opt.cstar, seed);
  const bool finite_pen = cert.penalized.status == MinStatus::Finite;
  const double pinf = cert.penalized.best_value;

  if (cert.cstar.status == CStarStatus::Unbounded ||
      (cert.cstar.status != CStarStatus::Unbounded && cert.cstar.value > pen.c * (1.0 + 1e-6))) {
    cert.status = CertStatus::CounterexampleFound;
    cert.witness = cert.cstar.witness;
    cert.witness_kind = "ratio";
    return cert;
  }
  if (finite_pen && pinf < cert.fstar - opt.tol) {
    cert.status = CertStatus::CounterexampleFound;
    cert.witness = cert.penalized.best_point;
    cert.witness_kind = "penalized_minimizer";
    return cert;
  }
  if (!finite_pen || std::abs(pinf - cert.fstar) > opt.tol) {
    cert.status = CertStatus::Inconclusive;
    return cert;
  }

  // argmin transfer only holds for c strictly above the threshold
  const double chat = cert.cstar.status == CStarStatus::Finite ? cert.cstar.value : 0.0;
  if (pen.c > chat * (1.0 + 1e-3)) {
    cert.argmin_checked = true;
    const Vec& xm = cert.penalized.best_point;
    const double res = residual_or_inf(r, xm);
    const double fx = eval_or_inf(p.objective, xm);
    if (!(res <= 1e-6) || !(std::abs(fx - cert.fstar) <= 1e-4)) {
      cert.status = CertStatus::Inconclusive;
      cert.witness = xm;
      cert.witness_kind = "penalized_minimizer";
      return cert;
    }
    cert.witness = xm;
    cert.witness_kind = "penalized_minimizer";
  } else {
    cert.witness = cert.fstar_point;
    cert.witness_kind = "feasible_minimizer";
  }
  cert.status = CertStatus::CertifiedExactOnDomain;
  return cert;
}

}  // namespace penaltylab
