#include "penaltylab/problem.hpp"

#include <cmath>

#include "penaltylab/errors.hpp"

namespace penaltylab {

SearchDomain SearchDomain::cube(int n, double half_width, double escape_scale) {
  SearchDomain d;
  d.lo = Vec::Constant(n, -half_width);
  d.hi = Vec::Constant(n, half_width);
  d.escape_scale = escape_scale;
  return d;
}

void SearchDomain::validate() const {
  if (lo.size() == 0 || lo.size() != hi.size()) throw UsageError("box bounds have inconsistent sizes");
  if (!lo.allFinite() || !hi.allFinite()) throw UsageError("box bounds must be finite");
  if ((lo.array() > hi.array()).any()) throw UsageError("box is empty");
  if (!(escape_scale > 0.0) || !std::isfinite(escape_scale)) throw UsageError("escape scale must be positive");
  if (escape_scale < half_width().maxCoeff()) throw UsageError("escape scale is below the box half-width");
}

namespace {

void check_expr(const Expression& e, int n, const char* what) {
  if (e.empty()) throw UsageError(std::string(what) + " is missing");
  if (e.max_variable() >= n) throw UsageError(std::string(what) + " uses a variable beyond n");
}

}  // namespace

void validate(const Problem& p) {
  if (p.n < 1) throw UsageError("dimension must be positive");
  check_expr(p.objective, p.n, "objective");
  if (const auto* cone = std::get_if<ConeForm>(&p.feasible)) {
    if (cone->g.empty()) throw UsageError("cone form needs at least one constraint");
    if (cone->g.size() != cone->cone.factors.size()) throw UsageError("constraint and cone sizes differ");
    for (const Expression& g : cone->g) check_expr(g, p.n, "constraint");
  } else {
    check_expr(std::get<ResidualForm>(p.feasible).psi, p.n, "residual");
  }
  if (p.domain.dim() != p.n) throw UsageError("box dimension differs from n");
  p.domain.validate();
}

}  // namespace penaltylab
