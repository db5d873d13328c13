#pragma once

#include <cstdint>
#include <vector>

#include "penaltylab/problem.hpp"
#include "penaltylab/solver.hpp"

namespace penaltylab {

struct CalmnessPoint {
  Vec u;
  double norm = 0.0;
  MinStatus status = MinStatus::Infeasible;
  double value = kInf;      // V(u)
  double quotient = 0.0;    // (V(0) − V(u)) / ‖u‖, finite points only
};

struct CalmnessScan {
  double v0 = 0.0;
  std::vector<CalmnessPoint> points;
  double modulus = -kInf;   // max quotient over feasible grid points
  bool diverging = false;
};

/// ±10^{-k} e_i for k = 0..kmax and every perturbation axis i, ordered by
/// axis, sign, then shrinking norm.
std::vector<Vec> default_u_grid(int m, int kmax = 6);

/// V(u) = inf{f(x) : g(x) ∈ C + u} on the problem's box. Requires ConeForm.
/// `diverging` means some ray of the grid has quotients that never decrease
/// as ‖u‖ shrinks and end above 1e3.
CalmnessScan scan_value_function(const Problem& p, const std::vector<Vec>& u_grid, const Budget& b,
                                 std::uint64_t seed);

}  // namespace penaltylab
