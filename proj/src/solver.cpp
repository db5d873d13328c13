#include "penaltylab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/gradient.hpp"

namespace penaltylab {

std::string to_string(MinStatus s) {
  switch (s) {
    case MinStatus::Finite: return "Finite";
    case MinStatus::Unbounded: return "Unbounded";
    case MinStatus::Infeasible: return "Infeasible";
  }
  return "?";
}

namespace {

double safe_call(const ScalarFn& f, const Vec& x) {
  const double v = f(x);
  return std::isnan(v) ? kInf : v;
}

}  // namespace

PatternResult pattern_search(const ScalarFn& f, const Vec& x0, const PatternOptions& opt, Rng& rng) {
  const Eigen::Index n = x0.size();
  auto clamp = [&](const Vec& y) { return Vec(y.cwiseMax(opt.lo).cwiseMin(opt.hi)); };

  PatternResult res;
  res.x = clamp(x0);
  res.value = safe_call(f, res.x);
  if (opt.on_accept) opt.on_accept(res.x, res.value);
  if (res.value < opt.stop_below) {
    res.stopped_below = true;
    return res;
  }

  double step = opt.initial_step;
  std::vector<Vec> dirs;
  dirs.reserve(static_cast<std::size_t>(4 * n));
  for (; res.iters < opt.max_iters && step >= opt.min_step; ++res.iters) {
    dirs.clear();
    for (Eigen::Index i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = opt.scale[i];
      dirs.push_back(e);
      dirs.push_back(-e);
    }
    if (opt.random_directions && n > 1) {
      const Mat q = random_orthonormal(rng, n);
      for (Eigen::Index j = 0; j < n; ++j) {
        const Vec d = q.col(j).cwiseProduct(opt.scale);
        dirs.push_back(d);
        dirs.push_back(-d);
      }
    }

    int best_dir = -1;
    Vec best_x;
    double best_v = res.value;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      Vec y = clamp(res.x + step * dirs[k]);
      const double v = safe_call(f, y);
      if (v < best_v) {
        best_v = v;
        best_x = std::move(y);
        best_dir = static_cast<int>(k);
      }
    }
    if (best_dir < 0) {
      step *= 0.5;
      continue;
    }

    // expand along the winning direction while it keeps paying off
    double t = step;
    for (int e = 0; e < 40 && best_v >= opt.stop_below; ++e) {
      t *= 2.0;
      Vec y = clamp(res.x + t * dirs[static_cast<std::size_t>(best_dir)]);
      const double v = safe_call(f, y);
      if (!(v < best_v)) break;
      best_v = v;
      best_x = std::move(y);
    }
    res.x = std::move(best_x);
    res.value = best_v;
    if (opt.on_accept) opt.on_accept(res.x, res.value);
    if (res.value < opt.stop_below) {
      res.stopped_below = true;
      ++res.iters;
      return res;
    }
    step = std::min(step * 2.0, opt.initial_step);
  }
  return res;
}

PatternOptions box_options(const SearchDomain& d, int iters) {
  PatternOptions opt;
  opt.lo = d.lo;
  opt.hi = d.hi;
  opt.scale = d.half_width().cwiseMax(1e-12);
  opt.max_iters = iters;
  return opt;
}

Vec start_point(const SearchDomain& d, int k, const Vec& shift) {
  if (k == 0) return d.center();
  const Vec u = halton_point(static_cast<std::uint64_t>(k - 1), d.dim(), shift);
  return d.lo + u.cwiseProduct(d.hi - d.lo);
}

// ------------------------------------------------------------ restoration

namespace {

// Residual vector whose norm is the feasibility residual, plus the
// constraint components that are currently active.
struct ResidualModel {
  const FeasibleSet& set;

  Vec value(const Vec& x) const {
    if (const auto* cone = std::get_if<ConeForm>(&set)) {
      const Vec g = constraint_values(*cone, x);
      if (!g.allFinite()) return Vec::Constant(g.size(), kInf);
      return g - project_to_cone(g, cone->cone);
    }
    const double psi = eval_or_inf(std::get<ResidualForm>(set).psi, x);
    return Vec::Constant(1, psi < 0.0 ? 0.0 : psi);
  }

  ScalarFn component(std::size_t i) const {
    if (const auto* cone = std::get_if<ConeForm>(&set)) return as_function(cone->g[i]);
    return as_function(std::get<ResidualForm>(set).psi);
  }
};

double norm_or_inf(const Vec& r) { return r.allFinite() ? r.norm() : kInf; }

void gauss_newton(const ResidualModel& model, const SearchDomain& d, int iters, RestoreResult& st) {
  Vec r = model.value(st.x);
  st.residual = norm_or_inf(r);
  for (int it = 0; it < iters && std::isfinite(st.residual) && st.residual > 1e-20; ++it) {
    std::vector<ScalarFn> comps;
    std::vector<Eigen::Index> active;
    for (Eigen::Index i = 0; i < r.size(); ++i) {
      if (r[i] != 0.0) {
        comps.push_back(model.component(static_cast<std::size_t>(i)));
        active.push_back(i);
      }
    }
    Mat jac;
    try {
      const double h = 1e-7 * std::max(1.0, st.x.lpNorm<Eigen::Infinity>());
      jac = fd_jacobian(comps, st.x, h);
    } catch (const EvalError&) {
      return;
    }
    Vec ra(static_cast<Eigen::Index>(active.size()));
    for (std::size_t k = 0; k < active.size(); ++k) ra[static_cast<Eigen::Index>(k)] = r[active[k]];
    if (jac.norm() == 0.0) return;

    std::vector<Vec> steps;
    steps.push_back(-jac.completeOrthogonalDecomposition().solve(ra));
    if (active.size() == 1 && st.x.size() > 1) {
      // a single residual with badly scaled partials: the min-norm step
      // chases the dominant coordinate, so offer per-coordinate Newton steps
      for (Eigen::Index i = 0; i < st.x.size(); ++i) {
        if (jac(0, i) == 0.0) continue;
        Vec e = Vec::Zero(st.x.size());
        e[i] = -ra[0] / jac(0, i);
        steps.push_back(e);
      }
    }

    const Vec base = st.x;
    bool accepted = false;
    Vec best_x = base;
    Vec best_r = r;
    double best_n = st.residual;
    for (const Vec& delta : steps) {
      if (!delta.allFinite()) continue;
      double t = 1.0;
      for (int bt = 0; bt < 40; ++bt, t *= 0.5) {
        const Vec y = d.clamp(base + t * delta);
        const Vec ry = model.value(y);
        const double ny = norm_or_inf(ry);
        if (ny < st.residual) {
          if (ny < best_n) {
            best_x = y;
            best_r = ry;
            best_n = ny;
          }
          accepted = true;
          break;
        }
      }
      // a full step undershoots on degenerate roots (ψ ~ |x|^p), so keep
      // stretching while the residual drops
      if (t == 1.0) {
        for (double s = 2.0; s <= 64.0; s *= 2.0) {
          const Vec y = d.clamp(base + s * delta);
          const Vec ry = model.value(y);
          const double ny = norm_or_inf(ry);
          if (!(ny < best_n)) break;
          best_x = y;
          best_r = ry;
          best_n = ny;
        }
      }
    }
    st.x = best_x;
    r = best_r;
    st.residual = best_n;
    if (!accepted) return;
  }
}

}  // namespace

RestoreResult restore(const FeasibleSet& s, const Vec& x, const SearchDomain& d, int iters) {
  const ResidualModel model{s};
  RestoreResult st{d.clamp(x), kInf};
  gauss_newton(model, d, iters, st);
  if (st.residual <= kTightFeasibleTol) return st;

  // nonsmooth or flat residual: derivative-free descent, then polish
  PatternOptions opt = box_options(d, iters * 2);
  opt.initial_step = 0.05;
  opt.min_step = 1e-15;
  opt.random_directions = false;
  opt.stop_below = 0.0;  // never reached; residual values are ≥ 0
  Rng rng(0x5eed);
  const PatternResult pr = pattern_search(
      [&](const Vec& y) { return norm_or_inf(model.value(y)); }, st.x, opt, rng);
  if (pr.value < st.residual) {
    st.x = pr.x;
    st.residual = pr.value;
    gauss_newton(model, d, iters, st);
  }
  return st;
}

// ------------------------------------------------------------ global solvers

namespace {

bool better(double v, int k, double best_v, int best_k) {
  return v < best_v || (v == best_v && k < best_k);
}

// Returns true (and fills the witness) when some probe falls below the
// unboundedness threshold.
bool ray_probe(const ScalarFn& f, const Vec& origin, const SearchDomain& d, Rng& rng, Vec& witness,
               double& value) {
  const Eigen::Index n = origin.size();
  std::vector<Vec> dirs;
  for (Eigen::Index i = 0; i < n; ++i) {
    dirs.push_back(Vec::Unit(n, i));
    dirs.push_back(-Vec::Unit(n, i));
  }
  for (Eigen::Index j = 0; j < 2 * n + 4; ++j) dirs.push_back(unit_vector(rng, n));
  const double r_min = std::max(1.0, d.half_width().maxCoeff() / 10.0);
  for (const Vec& dir : dirs) {
    for (double r = d.escape_scale; r >= r_min; r /= std::sqrt(10.0)) {
      // escape_scale bounds every coordinate magnitude
      const Vec y = (origin + r * dir).cwiseMax(-d.escape_scale).cwiseMin(d.escape_scale);
      const double v = safe_call(f, y);
      if (v < kUnboundedThreshold) {
        witness = y;
        value = v;
        return true;
      }
    }
  }
  return false;
}

}  // namespace

MinimizeResult minimize_unconstrained(const ScalarFn& f, const SearchDomain& d, const Budget& b,
                                      std::uint64_t seed) {
  d.validate();
  if (b.starts < 1 || b.iters < 1) throw UsageError("budget must allow at least one start and one iteration");
  const Vec shift = halton_shift(seed, d.dim());
  PatternOptions opt = box_options(d, b.iters);
  opt.stop_below = kUnboundedThreshold;

  MinimizeResult out;
  out.seed = seed;
  for (int k = 0; k < b.starts; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const PatternResult pr = pattern_search(f, start_point(d, k, shift), opt, rng);
    out.starts_used = k + 1;
    if (pr.stopped_below) {
      out.status = MinStatus::Unbounded;
      out.best_value = pr.value;
      out.best_point = pr.x;
      out.best_start = k;
      return out;
    }
    Vec witness;
    double wv = 0.0;
    if (ray_probe(f, pr.x, d, rng, witness, wv) || (k == 0 && ray_probe(f, d.center(), d, rng, witness, wv))) {
      out.status = MinStatus::Unbounded;
      out.best_value = wv;
      out.best_point = witness;
      out.best_start = k;
      return out;
    }
    if (std::isfinite(pr.value) && better(pr.value, k, out.best_value, out.best_start)) {
      out.status = MinStatus::Finite;
      out.best_value = pr.value;
      out.best_point = pr.x;
      out.best_start = k;
    }
  }
  if (out.status == MinStatus::Infeasible) out.best_point = d.center();
  return out;
}

MinimizeResult minimize_feasible(const Problem& p, const Budget& b, std::uint64_t seed) {
  validate(p);
  if (b.starts < 1 || b.iters < 1) throw UsageError("budget must allow at least one start and one iteration");
  const SearchDomain& d = p.domain;
  const Vec shift = halton_shift(seed, d.dim());
  PatternOptions opt = box_options(d, b.iters);
  opt.min_step = 1e-8;
  opt.stop_below = kUnboundedThreshold;

  // Starts are ranked by the residual tier their restoration reaches; the
  // search then only accepts points in that tier, since any slack is
  // exploited by the descent (ψ = x^4 lets f = -x^2 drop by sqrt(tol)).
  constexpr double kTiers[] = {kTightFeasibleTol, kFeasibleTol, kRelaxedFeasibleTol};
  MinimizeResult slots[3];
  for (int k = 0; k < b.starts; ++k) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(k)));
    const RestoreResult r0 = restore(p.feasible, start_point(d, k, shift), d);
    int tier = 0;
    while (tier < 3 && !(r0.residual <= kTiers[tier])) ++tier;
    if (tier == 3) continue;
    const double tol = kTiers[tier];

    auto lifted = [&](const Vec& y) {
      const RestoreResult r = restore(p.feasible, y, d, 60);
      return r.residual <= tol ? eval_or_inf(p.objective, r.x) : kInf;
    };
    const PatternResult pr = pattern_search(lifted, r0.x, opt, rng);
    const RestoreResult fin = restore(p.feasible, pr.x, d, 60);
    const double value = eval_or_inf(p.objective, fin.x);
    if (!std::isfinite(value) || !(fin.residual <= tol)) continue;

    MinimizeResult& slot = slots[tier];
    if (better(value, k, slot.best_value, slot.best_start)) {
      slot.status = value < kUnboundedThreshold ? MinStatus::Unbounded : MinStatus::Finite;
      slot.best_value = value;
      slot.best_point = fin.x;
      slot.best_start = k;
    }
  }
  MinimizeResult out;
  for (const MinimizeResult& slot : slots) {
    if (slot.status != MinStatus::Infeasible) {
      out = slot;
      break;
    }
  }
  out.seed = seed;
  out.starts_used = b.starts;
  if (out.status == MinStatus::Infeasible) out.best_point = d.center();
  return out;
}

PatternResult minimize_on_sphere(const ScalarFn& f, const Vec& center, double radius, int extra_starts,
                                 int iters, Rng& rng) {
  const Eigen::Index n = center.size();
  auto on_sphere = [&](const Vec& u) -> Vec { return center + radius * u / u.norm(); };
  std::vector<Vec> starts;
  for (Eigen::Index i = 0; i < n; ++i) {
    starts.push_back(Vec::Unit(n, i));
    starts.push_back(-Vec::Unit(n, i));
  }
  PatternResult best;
  best.value = kInf;
  if (n == 1) {
    for (const Vec& u : starts) {
      const Vec x = on_sphere(u);
      const double v = safe_call(f, x);
      if (v < best.value || best.x.size() == 0) {
        best.x = x;
        best.value = v;
      }
    }
    return best;
  }
  for (int j = 0; j < extra_starts; ++j) starts.push_back(unit_vector(rng, n));

  PatternOptions opt;
  opt.lo = Vec::Constant(n, -1.0);
  opt.hi = Vec::Constant(n, 1.0);
  opt.scale = Vec::Ones(n);
  opt.initial_step = 0.25;
  opt.min_step = 1e-12;
  opt.max_iters = iters;
  auto g = [&](const Vec& u) {
    const double nu = u.norm();
    return nu < 1e-9 ? kInf : f(on_sphere(u));
  };
  for (const Vec& u0 : starts) {
    PatternResult pr = pattern_search(g, u0, opt, rng);
    if (pr.value < best.value || best.x.size() == 0) {
      best.value = pr.value;
      best.iters = pr.iters;
      best.x = pr.x.norm() < 1e-9 ? on_sphere(u0) : on_sphere(pr.x);
    }
  }
  return best;
}

}  // namespace penaltylab
