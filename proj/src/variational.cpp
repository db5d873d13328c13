#include "penaltylab/variational.hpp"

#include <algorithm>
#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

namespace {

const ConeForm& require_cone(const Problem& p) {
  const auto* cone = std::get_if<ConeForm>(&p.feasible);
  if (cone == nullptr) throw UsageError("variational probes need a cone-form problem");
  return *cone;
}

std::vector<ScalarFn> components(const ConeForm& c) {
  std::vector<ScalarFn> out;
  for (const Expression& g : c.g) out.push_back(as_function(g));
  return out;
}

struct PairMin {
  double norm;
  double lambda;
};

// min over λ ∈ [1e-9, 1 − 1e-9] of ‖v + λ(u − v)‖
PairMin pair_min(const Vec& u, const Vec& v) {
  const Vec d = u - v;
  const double dd = d.squaredNorm();
  double lambda = dd > 0.0 ? -v.dot(d) / dd : 0.5;
  lambda = std::clamp(lambda, 1e-9, 1.0 - 1e-9);
  return {(v + lambda * d).norm(), lambda};
}

Vec checked_g(const ConeForm& cone, const Vec& x) {
  const Vec y = constraint_values(cone, x);
  if (!y.allFinite()) throw EvalError(EvalErrorKind::NonFinite, "constraint map is not finite at x");
  return y;
}

}  // namespace

NuProbe nu_estimate(const Problem& p, const Vec& x, const NuOptions& opt) {
  const ConeForm& cone = require_cone(p);
  if (x.size() != p.n) throw EvalError(EvalErrorKind::DimensionMismatch, "point has the wrong dimension");
  NuProbe probe;
  probe.x = x;
  const Vec y = checked_g(cone, x);
  const std::vector<Vec> dirs = normal_directions_at_projection(y, cone.cone, opt.resolution);
  if (dirs.empty()) {
    probe.empty_normals = true;
    return probe;
  }

  const ScalarFn f = as_function(p.objective);
  const std::vector<ScalarFn> g = components(cone);
  const double h = cloud_step(opt.cloud);
  std::vector<Vec> us{fd_gradient(f, x, h)};
  for (Vec& s : sample_subgradients(f, x, opt.cloud).samples) us.push_back(std::move(s));
  std::vector<Mat> js{fd_jacobian(g, x, h)};
  for (Mat& j : sample_jacobians(g, x, opt.cloud)) js.push_back(std::move(j));

  for (const Vec& w : dirs) {
    for (const Mat& j : js) {
      const Vec v = j.transpose() * w;
      for (const Vec& u : us) {
        const PairMin pm = pair_min(u, v);
        if (pm.norm < probe.nu_hat) {
          probe.nu_hat = pm.norm;
          probe.lambda = pm.lambda;
          probe.w = w;
          probe.u = u;
          probe.v = v;
        }
      }
    }
  }
  return probe;
}

MfcqReport mfcq_check(const Problem& p, const Vec& x, double threshold, const NuOptions& opt) {
  const ConeForm& cone = require_cone(p);
  if (x.size() != p.n) throw EvalError(EvalErrorKind::DimensionMismatch, "point has the wrong dimension");
  const Vec y = checked_g(cone, x);
  if (dist_to_cone(y, cone.cone) > 1e-6) throw UsageError("MFCQ is only defined at feasible points");
  MfcqReport rep;
  rep.x = x;
  rep.threshold = threshold;
  const std::vector<Vec> dirs = normal_cone_directions(y, cone.cone, opt.resolution, 1e-6);
  const std::vector<ScalarFn> g = components(cone);
  std::vector<Mat> js{fd_jacobian(g, x, cloud_step(opt.cloud))};
  for (Mat& j : sample_jacobians(g, x, opt.cloud)) js.push_back(std::move(j));
  for (const Vec& w : dirs) {
    for (const Mat& j : js) {
      const double nv = (j.transpose() * w).norm();
      if (nv < rep.min_norm) {
        rep.min_norm = nv;
        rep.w = w;
      }
    }
  }
  rep.holds = rep.min_norm > threshold;
  return rep;
}

bool meets_kinf_invariants(const ClusterValue& c) {
  const double target = std::isfinite(c.level) ? c.level : c.t;
  return c.norm >= 1e3 && c.norm_nu <= 1e-2 && c.dist <= 1e-3 && c.dist > 0.0 && std::abs(c.f - target) <= 1e-2;
}

ClusterValue diagnose(const Problem& p, const Vec& x, const NuOptions& opt, std::uint64_t cloud_seed) {
  const ConeForm& cone = require_cone(p);
  ClusterValue c;
  c.x = x;
  c.cloud_seed = cloud_seed;
  c.norm = x.norm();
  c.f = eval_or_inf(p.objective, x);
  c.t = c.f;
  c.dist = dist_to_cone(constraint_values(cone, x), cone.cone);
  NuOptions o = opt;
  o.cloud.seed = cloud_seed;
  try {
    c.norm_nu = c.norm * nu_estimate(p, x, o).nu_hat;
  } catch (const EvalError&) {
    c.norm_nu = kInf;
  }
  return c;
}

KInfinityReport k_infinity_probe(const Problem& p, double fstar, const KInfOptions& opt, std::uint64_t seed) {
  validate(p);
  const ConeForm& cone = require_cone(p);
  KInfinityReport rep;
  rep.fstar = fstar;
  const ScalarFn f = as_function(p.objective);
  const std::vector<ScalarFn> g = components(cone);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  // explicit curves
  for (std::size_t i = 0; i < opt.path_family.size(); ++i) {
    const auto& curve = opt.path_family[i];
    if (static_cast<int>(curve.size()) != p.n) throw UsageError("path needs one expression per coordinate");
    std::vector<Vec> iterates;
    for (double s : opt.path_params) {
      Vec x(p.n);
      for (int k = 0; k < p.n; ++k) x[k] = eval(curve[static_cast<std::size_t>(k)], Vec::Constant(1, s)).value();
      iterates.push_back(x);
    }
    rep.paths.push_back(iterates);
    ClusterValue c = diagnose(p, iterates.back(), opt.nu, derive_seed(seed, 500 + i));
    c.level = nan;
    c.source = "path " + std::to_string(i);
    if (meets_kinf_invariants(c)) rep.cluster_values.push_back(c);
  }

  // generic shell search
  auto fast_nu = [&](const Vec& x) {
    try {
      const Vec y = constraint_values(cone, x);
      const std::vector<Vec> dirs = normal_directions_at_projection(y, cone.cone, 16);
      if (dirs.empty()) return kInf;
      const Vec u = fd_gradient(f, x);
      const Mat j = fd_jacobian(g, x);
      double best = kInf;
      for (const Vec& w : dirs) best = std::min(best, pair_min(u, j.transpose() * w).norm);
      return best;
    } catch (const Error&) {
      return kInf;
    }
  };
  const Vec origin = Vec::Zero(p.n);
  for (int j = 0; j < opt.levels; ++j) {
    const double level = fstar + opt.margin - 0.1 * j * std::max(1.0, std::abs(fstar));
    auto score = [&](const Vec& x) {
      const double dist = dist_to_cone(constraint_values(cone, x), cone.cone);
      if (!(dist > 0.0) || !std::isfinite(dist)) return kInf;  // K∞ only sees x ∉ S
      const double fx = f(x);
      if (!std::isfinite(fx)) return kInf;
      return x.norm() * fast_nu(x) + dist + std::abs(fx - level);
    };
    std::vector<Vec> iterates;
    for (std::size_t k = 0; k < opt.shells.size(); ++k) {
      Rng rng(derive_seed(seed, 1000 + 100 * static_cast<std::uint64_t>(j) + k));
      const PatternResult pr = minimize_on_sphere(score, origin, opt.shells[k], opt.extra_starts, opt.iters, rng);
      iterates.push_back(pr.x);
    }
    rep.paths.push_back(iterates);
    ClusterValue c = diagnose(p, iterates.back(), opt.nu, derive_seed(seed, 2000 + static_cast<std::uint64_t>(j)));
    c.level = level;
    c.source = "shells";
    if (meets_kinf_invariants(c)) rep.cluster_values.push_back(c);
  }

  for (const ClusterValue& c : rep.cluster_values) {
    if (c.t <= fstar + 1e-3) {
      rep.violated = true;
      rep.witness_t = c.t;
      break;
    }
  }
  return rep;
}

}  // namespace penaltylab
