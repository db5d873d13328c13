#include "penaltylab/penalty.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "penaltylab/errors.hpp"

namespace penaltylab {

ResidualSpec ResidualSpec::dist_to_cone(ConeForm s) {
  ResidualSpec r;
  r.kind = ResidualKind::DistToCone;
  r.cone = std::move(s);
  return r;
}

ResidualSpec ResidualSpec::max_plus(std::vector<Expression> g) {
  ResidualSpec r;
  r.kind = ResidualKind::MaxPlus;
  r.g = std::move(g);
  return r;
}

ResidualSpec ResidualSpec::custom(Expression psi) {
  ResidualSpec r;
  r.kind = ResidualKind::Custom;
  r.psi = std::move(psi);
  return r;
}

ResidualSpec default_residual(const FeasibleSet& s) {
  if (const auto* cone = std::get_if<ConeForm>(&s)) return ResidualSpec::dist_to_cone(*cone);
  return ResidualSpec::custom(std::get<ResidualForm>(s).psi);
}

ExtReal residual_eval(const ResidualSpec& r, const Vec& x) {
  switch (r.kind) {
    case ResidualKind::DistToCone: {
      Vec y(static_cast<Eigen::Index>(r.cone.g.size()));
      for (std::size_t i = 0; i < r.cone.g.size(); ++i)
        y[static_cast<Eigen::Index>(i)] = eval(r.cone.g[i], x).value();
      return ExtReal(dist_to_cone(y, r.cone.cone));
    }
    case ResidualKind::MaxPlus: {
      ExtReal m(0.0);
      for (const Expression& gi : r.g) {
        const ExtReal v = eval(gi, x);
        m = ext_max(m, v);
      }
      return m;
    }
    case ResidualKind::Custom: {
      const ExtReal v = eval(r.psi, x);
      if (v.value() < -1e-12) throw EvalError(EvalErrorKind::NegativeResidual, "residual is negative");
      return v.value() < 0.0 ? ExtReal(0.0) : v;
    }
  }
  return ExtReal::infinity();
}

double residual_or_inf(const ResidualSpec& r, const Vec& x) {
  try {
    return residual_eval(r, x).value();
  } catch (const EvalError& e) {
    if (e.kind() == EvalErrorKind::NegativeResidual || e.kind() == EvalErrorKind::DimensionMismatch) throw;
    return kInf;
  }
}

PenaltySpec PenaltySpec::plain(double c) { return {PenaltyForm::Plain, c, 1.0, 1.0}; }
PenaltySpec PenaltySpec::power(double c, double alpha) { return {PenaltyForm::Power, c, alpha, 1.0}; }
PenaltySpec PenaltySpec::two_power(double c, double alpha, double beta) {
  return {PenaltyForm::TwoPower, c, alpha, beta};
}
PenaltySpec PenaltySpec::curvature(double c, double alpha) {
  return {PenaltyForm::CurvatureWeighted, c, alpha, 1.0};
}

void PenaltySpec::validate() const {
  if (!(c > 0.0) || !std::isfinite(c)) throw UsageError("penalty parameter c must be positive and finite");
  if (!(alpha > 0.0) || alpha > 1.0) throw UsageError("alpha must lie in (0, 1]");
  if (form == PenaltyForm::TwoPower && !(beta >= 1.0 && std::isfinite(beta)))
    throw UsageError("beta must be at least 1");
}

PenaltySpec PenaltySpec::with_c(double value) const {
  PenaltySpec p = *this;
  p.c = value;
  return p;
}

std::string form_name(PenaltyForm form) {
  switch (form) {
    case PenaltyForm::Plain: return "plain";
    case PenaltyForm::Power: return "power";
    case PenaltyForm::TwoPower: return "twopower";
    case PenaltyForm::CurvatureWeighted: return "curvature";
  }
  return "?";
}

namespace {

std::string format_number(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_number(const std::string& text, std::size_t offset) {
  std::size_t b = 0;
  std::size_t e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  const std::string t = text.substr(b, e - b);
  std::size_t slash = t.find('/');
  char* end = nullptr;
  if (slash != std::string::npos) {
    // allow rational literals such as 1/2
    const std::string num = t.substr(0, slash);
    const std::string den = t.substr(slash + 1);
    const double a = std::strtod(num.c_str(), &end);
    if (num.empty() || end != num.c_str() + num.size()) throw ParseError("bad number '" + t + "'", offset + b);
    const double d = std::strtod(den.c_str(), &end);
    if (den.empty() || end != den.c_str() + den.size() || d == 0.0)
      throw ParseError("bad number '" + t + "'", offset + b);
    return a / d;
  }
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || !std::isfinite(v))
    throw ParseError("bad number '" + t + "'", offset + b);
  return v;
}

}  // namespace

PenaltySpec parse_penalty(std::string_view text) {
  const std::string t(text);
  const std::size_t open = t.find('(');
  const std::size_t close = t.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw ParseError("penalty must look like form(args)", 0);
  for (std::size_t i = close + 1; i < t.size(); ++i)
    if (!std::isspace(static_cast<unsigned char>(t[i]))) throw ParseError("trailing characters in penalty", i);
  std::string name;
  for (std::size_t i = 0; i < open; ++i)
    if (!std::isspace(static_cast<unsigned char>(t[i]))) name += t[i];

  std::vector<double> args;
  std::size_t start = open + 1;
  for (std::size_t i = open + 1; i <= close; ++i) {
    if (i == close || t[i] == ',') {
      args.push_back(parse_number(t.substr(start, i - start), start));
      start = i + 1;
    }
  }

  auto want = [&](std::size_t k) {
    if (args.size() != k)
      throw ParseError(name + " expects " + std::to_string(k) + " argument(s)", open);
  };
  PenaltySpec p;
  if (name == "plain") {
    want(1);
    p = PenaltySpec::plain(args[0]);
  } else if (name == "power") {
    want(2);
    p = PenaltySpec::power(args[0], args[1]);
  } else if (name == "twopower") {
    want(3);
    p = PenaltySpec::two_power(args[0], args[1], args[2]);
  } else if (name == "curvature") {
    want(2);
    p = PenaltySpec::curvature(args[0], args[1]);
  } else {
    throw ParseError("unknown penalty form '" + name + "'", 0);
  }
  p.validate();
  return p;
}

std::string to_string(const PenaltySpec& p) {
  std::string s = form_name(p.form) + "(" + format_number(p.c);
  if (p.form != PenaltyForm::Plain) s += "," + format_number(p.alpha);
  if (p.form == PenaltyForm::TwoPower) s += "," + format_number(p.beta);
  return s + ")";
}

namespace {

double power_or_zero(double psi, double a) {
  if (psi <= 0.0) return 0.0;
  if (std::isinf(psi)) return kInf;
  return a == 1.0 ? psi : std::pow(psi, a);
}

}  // namespace

double effective_residual(const PenaltySpec& p, double f, double psi) {
  switch (p.form) {
    case PenaltyForm::Plain: return psi;
    case PenaltyForm::Power: return power_or_zero(psi, p.alpha);
    case PenaltyForm::TwoPower: return power_or_zero(psi, p.alpha) + power_or_zero(psi, p.beta);
    case PenaltyForm::CurvatureWeighted: {
      if (std::isinf(f)) return kInf;
      const double w = power_or_zero(psi, p.alpha);
      return w == 0.0 ? 0.0 : (1.0 + f * f) * w;
    }
  }
  return kInf;
}

ExtReal penalized_eval(const Expression& f, const PenaltySpec& p, const ResidualSpec& r, const Vec& x) {
  p.validate();
  const ExtReal fx = eval(f, x);
  const ExtReal psi = residual_eval(r, x);
  if (fx.is_infinite()) return ExtReal::infinity();
  return fx + ExtReal(p.c) * ExtReal(effective_residual(p, fx.value(), psi.value()));
}

ScalarFn penalized_function(const Expression& f, const PenaltySpec& p, const ResidualSpec& r) {
  p.validate();
  return [f, p, r](const Vec& x) -> double {
    const double fx = eval_or_inf(f, x);
    if (std::isinf(fx)) return kInf;
    const double psi = residual_or_inf(r, x);
    const double eff = effective_residual(p, fx, psi);
    if (std::isinf(eff)) return kInf;
    const double v = fx + p.c * eff;
    return std::isnan(v) ? kInf : v;
  };
}

}  // namespace penaltylab
