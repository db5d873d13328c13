#include "penaltylab/distcond.hpp"

#include <algorithm>
#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

DistCondReport probe_distance_conditions(const Problem& p, const ResidualSpec& r, const DistCondOptions& opt,
                                         std::uint64_t seed) {
  validate(p);
  DistCondReport rep;
  rep.delta = opt.delta;
  rep.psi_bound = opt.psi_bound;

  const SearchDomain& box = p.domain;
  const SearchDomain escape = SearchDomain{box.center().array() - box.escape_scale,
                                           box.center().array() + box.escape_scale, box.escape_scale};

  // sample of S: restorations from starts in the box and in the escape cube
  std::vector<Vec> s_sample;
  const Vec shift_box = halton_shift(derive_seed(seed, 1), box.dim());
  const Vec shift_esc = halton_shift(derive_seed(seed, 2), box.dim());
  for (int k = 0; k < opt.s_starts; ++k) {
    const bool in_box = k % 2 == 0;
    const Vec x0 = in_box ? start_point(box, k / 2, shift_box) : start_point(escape, k / 2 + 1, shift_esc);
    const RestoreResult rr = restore(p.feasible, x0, escape, 60);
    if (rr.residual <= kFeasibleTol) s_sample.push_back(rr.x);
  }
  rep.s_sample_size = static_cast<int>(s_sample.size());
  if (s_sample.empty()) return rep;
  rep.status = DistCondStatus::Evaluated;

  auto dist_est = [&](const Vec& x) {
    double best = kInf;
    for (const Vec& s : s_sample) best = std::min(best, (x - s).norm());
    const RestoreResult rr = restore(p.feasible, x, escape, 30);
    if (rr.residual <= kFeasibleTol) best = std::min(best, (x - rr.x).norm());
    return best;
  };
  auto psi = [&](const Vec& x) { return residual_or_inf(r, x); };

  auto c1_score = [&](const Vec& x) {
    const double v = psi(x);
    if (!std::isfinite(v)) return kInf;
    return v + opt.weight * std::max(opt.delta - dist_est(x), 0.0);
  };
  auto c2_score = [&](const Vec& x) {
    const double v = psi(x);
    if (!std::isfinite(v)) return kInf;
    const double dist = dist_est(x);
    return -dist + opt.weight * std::max(v - opt.psi_bound, 0.0) * std::max(1.0, dist);
  };

  const std::vector<double> radii = shell_radii(box.escape_scale);
  const Vec center = box.center();
  for (std::size_t j = 0; j < radii.size(); ++j) {
    Rng rng(derive_seed(seed, 10 + j));
    const PatternResult a = minimize_on_sphere(c1_score, center, radii[j], opt.extra_starts, opt.iters, rng);
    rep.c1_path.push_back({radii[j], a.x, dist_est(a.x), psi(a.x)});
    const PatternResult b = minimize_on_sphere(c2_score, center, radii[j], opt.extra_starts, opt.iters, rng);
    rep.c2_path.push_back({radii[j], b.x, dist_est(b.x), psi(b.x)});
  }

  if (radii.size() >= 3) {
    const auto& path = rep.c1_path;
    bool trend = true;
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (!(path[j].phi >= opt.delta)) trend = false;
      if (j > 0 && path[j].psi > path[j - 1].psi) trend = false;
    }
    const double last = path.back().psi;
    rep.c1_holds = !(trend && last <= 1e-2 && last <= std::max(1e-2 * path.front().psi, 1e-12));

    const auto& path2 = rep.c2_path;
    bool growing = true;
    for (std::size_t j = 0; j < path2.size(); ++j) {
      if (!(path2[j].psi <= opt.psi_bound)) growing = false;
      if (j > 0 && path2[j].phi < path2[j - 1].phi) growing = false;
    }
    rep.c2_holds = !(growing && path2.back().phi >= 10.0 * std::max(path2.front().phi, opt.delta));
  }
  return rep;
}

}  // namespace penaltylab
