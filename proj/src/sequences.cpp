#include "penaltylab/sequences.hpp"

#include <algorithm>
#include <cmath>

#include "penaltylab/errors.hpp"
#include "penaltylab/random.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

std::vector<double> shell_radii(double escape_scale) {
  std::vector<double> radii;
  for (double r = 10.0; r <= escape_scale * (1.0 + 1e-12); r *= 10.0) radii.push_back(r);
  return radii;
}

namespace {

double phi_spread(const ScalarFn& phi, const SearchDomain& d, std::uint64_t seed) {
  const Vec shift = halton_shift(seed, d.dim());
  double lo = kInf;
  double hi = -kInf;
  for (int k = 0; k < 1024; ++k) {
    const Vec x = d.lo + halton_point(static_cast<std::uint64_t>(k), d.dim(), shift).cwiseProduct(d.hi - d.lo);
    const double v = phi(x);
    if (!std::isfinite(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi > lo ? hi - lo : 0.0;
}

}  // namespace

SequenceVerdict probe_sequence_types(const ScalarFn& phi, const ScalarFn& psi, const SearchDomain& d,
                                     const SequenceOptions& opt, std::uint64_t seed) {
  d.validate();
  SequenceVerdict v;
  v.epsilon_used = opt.epsilon > 0.0 ? opt.epsilon : 0.1 * phi_spread(phi, d, derive_seed(seed, 3));
  v.bound_used = opt.psi_bound;
  const double eps = v.epsilon_used;
  const double bound = opt.psi_bound;
  const std::vector<double> radii = shell_radii(d.escape_scale);
  const Vec center = d.center();

  auto first_score = [&](const Vec& x) {
    const double p = psi(x);
    const double f = phi(x);
    if (!std::isfinite(p) || !std::isfinite(f)) return kInf;
    return p + opt.weight * std::max(eps - f, 0.0);
  };
  auto second_score = [&](const Vec& x) {
    const double p = psi(x);
    const double f = phi(x);
    if (!std::isfinite(p) || !std::isfinite(f)) return kInf;
    return -f + opt.weight * std::max(p - bound, 0.0) * std::max(1.0, std::abs(f));
  };

  for (std::size_t j = 0; j < radii.size(); ++j) {
    Rng rng(derive_seed(seed, 10 + j));
    const PatternResult a = minimize_on_sphere(first_score, center, radii[j], opt.extra_starts, opt.iters, rng);
    v.first_path.push_back({radii[j], a.x, phi(a.x), psi(a.x)});
    const PatternResult b = minimize_on_sphere(second_score, center, radii[j], opt.extra_starts, opt.iters, rng);
    v.second_path.push_back({radii[j], b.x, phi(b.x), psi(b.x)});
  }

  // first type: ψ nonincreasing and collapsing while φ stays ≥ ε
  if (radii.size() >= 3 && eps > 0.0) {
    const auto& path = v.first_path;
    bool ok = true;
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (!(path[j].phi >= eps)) ok = false;
      if (j > 0 && path[j].psi > path[j - 1].psi) ok = false;
    }
    const double last = path.back().psi;
    v.first_found = ok && last <= 1e-2 && last <= std::max(1e-2 * path.front().psi, 1e-12);
  }

  // second type: ψ ≤ B throughout and φ crossing the threshold
  if (radii.size() >= 3) {
    const auto& path = v.second_path;
    bool ok = true;
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (!(path[j].psi <= bound)) ok = false;
      if (j > 0 && path[j].phi < path[j - 1].phi) ok = false;
    }
    v.second_found = ok && path.back().phi >= kSecondTypeThreshold;
  }
  return v;
}

}  // namespace penaltylab
