#include "penaltylab/calmness.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "penaltylab/errors.hpp"

namespace penaltylab {

std::vector<Vec> default_u_grid(int m, int kmax) {
  std::vector<Vec> grid;
  for (int i = 0; i < m; ++i) {
    for (double sign : {1.0, -1.0}) {
      for (int k = 0; k <= kmax; ++k) grid.push_back(sign * std::pow(10.0, -k) * Vec::Unit(m, i));
    }
  }
  return grid;
}

CalmnessScan scan_value_function(const Problem& p, const std::vector<Vec>& u_grid, const Budget& b,
                                 std::uint64_t seed) {
  validate(p);
  const auto* cone = std::get_if<ConeForm>(&p.feasible);
  if (cone == nullptr) throw UsageError("value-function scan needs a cone-form problem");

  CalmnessScan scan;
  const MinimizeResult base = minimize_feasible(p, b, seed);
  if (base.status != MinStatus::Finite) throw InfeasibleError("unperturbed problem has no finite value");
  scan.v0 = base.best_value;

  for (const Vec& u : u_grid) {
    if (u.size() != cone->cone.size()) throw UsageError("perturbation size differs from the number of constraints");
    CalmnessPoint pt;
    pt.u = u;
    pt.norm = u.norm();
    Problem shifted = p;
    std::get<ConeForm>(shifted.feasible).cone = translate(cone->cone, u);
    const MinimizeResult r = minimize_feasible(shifted, b, seed);
    pt.status = r.status;
    pt.value = r.best_value;
    if (r.status == MinStatus::Finite && pt.norm > 0.0) {
      pt.quotient = (scan.v0 - pt.value) / pt.norm;
      scan.modulus = std::max(scan.modulus, pt.quotient);
    }
    scan.points.push_back(pt);
  }

  // group grid points into rays (same unit direction) and look for growth
  std::map<std::vector<long long>, std::vector<const CalmnessPoint*>> rays;
  for (const CalmnessPoint& pt : scan.points) {
    if (pt.status != MinStatus::Finite || pt.norm == 0.0) continue;
    std::vector<long long> key;
    for (Eigen::Index i = 0; i < pt.u.size(); ++i) key.push_back(std::llround(pt.u[i] / pt.norm * 1e9));
    rays[key].push_back(&pt);
  }
  for (auto& [key, pts] : rays) {
    std::stable_sort(pts.begin(), pts.end(),
                     [](const CalmnessPoint* a, const CalmnessPoint* c) { return a->norm > c->norm; });
    if (pts.size() < 2) continue;
    bool growing = true;
    for (std::size_t j = 1; j < pts.size(); ++j)
      if (pts[j]->quotient < pts[j - 1]->quotient) growing = false;
    if (growing && pts.back()->quotient > 1e3) scan.diverging = true;
  }
  return scan;
}

}  // namespace penaltylab
