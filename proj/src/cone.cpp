#include "penaltylab/cone.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

#include "penaltylab/errors.hpp"

namespace penaltylab {

ConeFactor ConeFactor::interval(double a, double b) {
  if (std::isnan(a) || std::isnan(b)) throw UsageError("interval endpoint is NaN");
  if (a > b) throw UsageError("EmptyInterval");
  if (a == kInf || b == -kInf) throw UsageError("EmptyInterval");
  return interval_unchecked(a, b);
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

double parse_endpoint(const std::string& text, std::size_t offset) {
  const std::string t = trim(text);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  char* end = nullptr;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ParseError("bad interval endpoint '" + t + "'", offset);
  return v;
}

std::string format_endpoint(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// Normal cone of a single factor at a snapped point.
enum class Normal { Trivial, Plus, Minus, Full };

Normal factor_normal(const ConeFactor& f, double y) {
  const bool at_lo = std::isfinite(f.lo()) && y == f.lo();
  const bool at_hi = std::isfinite(f.hi()) && y == f.hi();
  if (at_lo && at_hi) return Normal::Full;
  if (at_hi) return Normal::Plus;
  if (at_lo) return Normal::Minus;
  return Normal::Trivial;
}

bool sign_ok(Normal n, double s) {
  switch (n) {
    case Normal::Full: return true;
    case Normal::Plus: return s >= 0.0;
    case Normal::Minus: return s <= 0.0;
    case Normal::Trivial: return s == 0.0;
  }
  return false;
}

}  // namespace

ConeFactor parse_factor(std::string_view text) {
  const std::string t = trim(text);
  if (t == "zero") return ConeFactor::zero();
  if (t == "nonpos") return ConeFactor::nonpos();
  if (t == "nonneg") return ConeFactor::nonneg();
  if (t == "line") return ConeFactor::line();
  if (t.rfind("interval", 0) == 0) {
    const std::size_t open = t.find('(');
    const std::size_t comma = t.find(',');
    const std::size_t close = t.rfind(')');
    if (open == std::string::npos || comma == std::string::npos || close != t.size() - 1 ||
        comma < open || trim(t.substr(8, open - 8)) != "")
      throw ParseError("malformed interval factor '" + t + "'", 0);
    const double a = parse_endpoint(t.substr(open + 1, comma - open - 1), open + 1);
    const double b = parse_endpoint(t.substr(comma + 1, close - comma - 1), comma + 1);
    return ConeFactor::interval(a, b);
  }
  throw ParseError("unknown cone factor '" + t + "'", 0);
}

std::string to_string(const ConeFactor& f) {
  switch (f.kind()) {
    case FactorKind::Zero: return "zero";
    case FactorKind::NonPos: return "nonpos";
    case FactorKind::NonNeg: return "nonneg";
    case FactorKind::Line: return "line";
    case FactorKind::Interval: break;
  }
  return "interval(" + format_endpoint(f.lo()) + "," + format_endpoint(f.hi()) + ")";
}

ConeSet translate(const ConeSet& c, const Vec& u) {
  if (u.size() != c.size()) throw EvalError(EvalErrorKind::DimensionMismatch, "translation size mismatch");
  ConeSet out;
  out.factors.reserve(c.factors.size());
  for (Eigen::Index i = 0; i < c.size(); ++i) out.factors.push_back(c.factors[i].translated(u[i]));
  return out;
}

Vec project_to_cone(const Vec& y, const ConeSet& c) {
  if (y.size() != c.size()) throw EvalError(EvalErrorKind::DimensionMismatch, "cone dimension mismatch");
  Vec p(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) p[i] = c.factors[i].project(y[i]);
  return p;
}

double dist_to_cone(const Vec& y, const ConeSet& c) {
  if (!y.allFinite()) return kInf;
  return (y - project_to_cone(y, c)).norm();
}

std::vector<Vec> normal_cone_directions(const Vec& y, const ConeSet& c, int resolution, double tol) {
  if (y.size() != c.size()) throw EvalError(EvalErrorKind::DimensionMismatch, "cone dimension mismatch");
  if (resolution < 4) throw UsageError("normal resolution must be at least 4");
  const Eigen::Index m = y.size();
  std::vector<Normal> kinds(static_cast<std::size_t>(m));
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < m; ++i) {
    const ConeFactor& f = c.factors[i];
    if (!f.contains(y[i], tol)) throw UsageError("point is not in the cone");
    double snapped = f.project(y[i]);
    if (std::isfinite(f.lo()) && std::abs(snapped - f.lo()) <= tol) snapped = f.lo();
    if (std::isfinite(f.hi()) && std::abs(snapped - f.hi()) <= tol) snapped = f.hi();
    kinds[i] = factor_normal(f, snapped);
    if (kinds[i] != Normal::Trivial) active.push_back(i);
  }

  std::vector<Vec> dirs;
  for (Eigen::Index i : active) {
    if (kinds[i] != Normal::Minus) dirs.push_back(Vec::Unit(m, i));
    if (kinds[i] != Normal::Plus) dirs.push_back(-Vec::Unit(m, i));
  }
  for (std::size_t a = 0; a < active.size(); ++a) {
    for (std::size_t b = a + 1; b < active.size(); ++b) {
      const Eigen::Index i = active[a];
      const Eigen::Index j = active[b];
      for (int k = 0; k < resolution; ++k) {
        const double theta = 2.0 * std::numbers::pi * k / resolution;
        const double ci = std::cos(theta);
        const double sj = std::sin(theta);
        // axis-aligned angles duplicate the generators above
        if (std::abs(ci) < 1e-12 || std::abs(sj) < 1e-12) continue;
        if (!sign_ok(kinds[i], ci) || !sign_ok(kinds[j], sj)) continue;
        Vec d = Vec::Zero(m);
        d[i] = ci;
        d[j] = sj;
        dirs.push_back(d);
      }
    }
  }
  return dirs;
}

std::vector<Vec> normal_directions_at_projection(const Vec& y, const ConeSet& c, int resolution) {
  const Vec p = project_to_cone(y, c);
  std::vector<Vec> dirs;
  const double d = (y - p).norm();
  if (d > 0.0) dirs.push_back((y - p) / d);
  std::vector<Vec> rest = normal_cone_directions(p, c, resolution, 0.0);
  dirs.insert(dirs.end(), rest.begin(), rest.end());
  return dirs;
}

Vec constraint_values(const ConeForm& s, const Vec& x) {
  Vec g(static_cast<Eigen::Index>(s.g.size()));
  for (std::size_t i = 0; i < s.g.size(); ++i) g[static_cast<Eigen::Index>(i)] = eval_or_inf(s.g[i], x);
  return g;
}

double feasibility_residual(const FeasibleSet& s, const Vec& x) {
  if (const auto* cone = std::get_if<ConeForm>(&s)) return dist_to_cone(constraint_values(*cone, x), cone->cone);
  const double v = eval(std::get<ResidualForm>(s).psi, x).value();
  if (v < -1e-12) throw EvalError(EvalErrorKind::NegativeResidual, "residual is negative");
  return v < 0.0 ? 0.0 : v;
}

bool is_member(const Vec& x, const FeasibleSet& s, double tol) { return feasibility_residual(s, x) <= tol; }

}  // namespace penaltylab
