#pragma once

#include <string>

#include "penaltylab/cone.hpp"
#include "penaltylab/expression.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

inline constexpr double kDefaultEscapeScale = 1e3;

/// Box searched by the local solvers plus the radius reached by escape probes.
struct SearchDomain {
  Vec lo;
  Vec hi;
  double escape_scale = kDefaultEscapeScale;

  static SearchDomain cube(int n, double half_width, double escape_scale = kDefaultEscapeScale);

  /// Nonempty finite box and escape_scale ≥ max half-width. Throws UsageError.
  void validate() const;
  Eigen::Index dim() const noexcept { return lo.size(); }
  Vec center() const { return (lo + hi) / 2.0; }
  Vec half_width() const { return (hi - lo) / 2.0; }
  Vec clamp(const Vec& x) const { return x.cwiseMax(lo).cwiseMin(hi); }
};

struct Problem {
  std::string name;
  int n = 0;
  Expression objective;
  FeasibleSet feasible;
  SearchDomain domain;
};

/// Checks dimensions of every expression and the domain. Throws UsageError.
void validate(const Problem& p);

}  // namespace penaltylab
