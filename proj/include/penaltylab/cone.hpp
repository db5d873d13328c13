#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "penaltylab/expression.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

enum class FactorKind { Zero, NonPos, NonNeg, Interval, Line };

/// A nonempty closed subset of R, stored as [lo, hi] with possibly infinite
/// endpoints. Translating a named factor yields an Interval.
class ConeFactor {
 public:
  static ConeFactor zero() { return {FactorKind::Zero, 0.0, 0.0}; }
  static ConeFactor nonpos() { return {FactorKind::NonPos, -kInf, 0.0}; }
  static ConeFactor nonneg() { return {FactorKind::NonNeg, 0.0, kInf}; }
  static ConeFactor line() { return {FactorKind::Line, -kInf, kInf}; }
  /// Throws UsageError("EmptyInterval") when a > b.
  static ConeFactor interval(double a, double b);

  FactorKind kind() const noexcept { return kind_; }
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

  double project(double y) const noexcept { return y < lo_ ? lo_ : (y > hi_ ? hi_ : y); }
  bool contains(double y, double tol = 0.0) const noexcept { return y >= lo_ - tol && y <= hi_ + tol; }
  ConeFactor translated(double u) const { return interval_unchecked(lo_ + u, hi_ + u); }

  friend bool operator==(const ConeFactor&, const ConeFactor&) = default;

 private:
  ConeFactor(FactorKind k, double lo, double hi) : kind_(k), lo_(lo), hi_(hi) {}
  static ConeFactor interval_unchecked(double a, double b) { return {FactorKind::Interval, a, b}; }

  FactorKind kind_;
  double lo_;
  double hi_;
};

/// `zero | nonpos | nonneg | interval(a,b) | line`; interval endpoints may be
/// written as -inf / inf.
ConeFactor parse_factor(std::string_view text);
std::string to_string(const ConeFactor& f);

/// C = factor_1 × … × factor_m.
struct ConeSet {
  std::vector<ConeFactor> factors;

  Eigen::Index size() const noexcept { return static_cast<Eigen::Index>(factors.size()); }
  friend bool operator==(const ConeSet&, const ConeSet&) = default;
};

/// Factorwise translate, C + u.
ConeSet translate(const ConeSet& c, const Vec& u);

Vec project_to_cone(const Vec& y, const ConeSet& c);
double dist_to_cone(const Vec& y, const ConeSet& c);

inline constexpr int kDefaultNormalResolution = 64;
inline constexpr double kMembershipTol = 1e-9;

/// Unit directions spanning the normal cone N_C(y) of the product at y ∈ C
/// (componentwise snapped to the factor when within `tol`). Single nontrivial
/// factors contribute their generators; every pair of nontrivial factors
/// contributes `resolution` angles of the unit circle, filtered to the cone.
/// Throws UsageError when y lies outside C beyond `tol`.
std::vector<Vec> normal_cone_directions(const Vec& y, const ConeSet& c,
                                        int resolution = kDefaultNormalResolution,
                                        double tol = kMembershipTol);

/// Normal directions at the projection Π_C(y). For y ∉ C the proximal normal
/// (y − Π_C(y)) / dist(y, C) comes first.
std::vector<Vec> normal_directions_at_projection(const Vec& y, const ConeSet& c,
                                                 int resolution = kDefaultNormalResolution);

// ---------------------------------------------------------------- feasible sets

/// S = {x : g(x) ∈ C}.
struct ConeForm {
  std::vector<Expression> g;
  ConeSet cone;
};

/// S = {x : psi(x) = 0} with psi asserted nonnegative.
struct ResidualForm {
  Expression psi;
};

using FeasibleSet = std::variant<ConeForm, ResidualForm>;

/// g(x) with evaluation failures mapped to +∞.
Vec constraint_values(const ConeForm& s, const Vec& x);

/// ConeForm: dist(g(x), C); ResidualForm: psi(x) clamped at 0 within 1e-12.
double feasibility_residual(const FeasibleSet& s, const Vec& x);

bool is_member(const Vec& x, const FeasibleSet& s, double tol = kMembershipTol);

}  // namespace penaltylab
