#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "penaltylab/calmness.hpp"
#include "penaltylab/certifier.hpp"
#include "penaltylab/envelope.hpp"
#include "penaltylab/gradient.hpp"
#include "penaltylab/problem_file.hpp"

namespace oracle {

namespace pl = penaltylab;

std::string Polynomial::text() const {
  std::string out;
  char buf[64];
  for (std::size_t t = 0; t < coef.size(); ++t) {
    std::snprintf(buf, sizeof buf, "%.17g", coef[t]);
    if (t) out += " + ";
    out += buf;
    for (int i = 0; i < n; ++i) {
      if (exps[t][i] == 0) continue;
      out += "*x" + std::to_string(i);
      if (exps[t][i] > 1) out += "^" + std::to_string(exps[t][i]);
    }
  }
  return out;
}

double Polynomial::value(const Vec& x) const {
  double s = 0.0;
  for (std::size_t t = 0; t < coef.size(); ++t) {
    double m = coef[t];
    for (int i = 0; i < n; ++i) m *= std::pow(x[i], exps[t][i]);
    s += m;
  }
  return s;
}

Vec Polynomial::gradient(const Vec& x) const {
  Vec g = Vec::Zero(n);
  for (std::size_t t = 0; t < coef.size(); ++t) {
    for (int j = 0; j < n; ++j) {
      if (exps[t][j] == 0) continue;
      double m = coef[t] * exps[t][j];
      for (int i = 0; i < n; ++i) m *= std::pow(x[i], i == j ? exps[t][i] - 1 : exps[t][i]);
      g[j] += m;
    }
  }
  return g;
}

Polynomial random_polynomial(std::mt19937_64& rng, int n, int terms, int max_degree) {
  std::uniform_real_distribution<double> c(-3.0, 3.0);
  std::uniform_int_distribution<int> e(0, max_degree);
  Polynomial p;
  p.n = n;
  for (int t = 0; t < terms; ++t) {
    p.coef.push_back(c(rng));
    std::vector<int> ex(n);
    for (int& v : ex) v = e(rng);
    p.exps.push_back(ex);
  }
  return p;
}

SuiteResult fd_vs_symbolic(int cases, double tol, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_int_distribution<int> terms(1, 5);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  SuiteResult r;
  for (int k = 0; k < cases; ++k) {
    const int n = dim(rng);
    const Polynomial p = random_polynomial(rng, n, terms(rng), 4);
    Vec x(n);
    for (int i = 0; i < n; ++i) x[i] = coord(rng);
    const pl::Expression e = pl::parse(p.text(), n);
    const Vec exact = p.gradient(x);
    const Vec fd = pl::fd_gradient(e, x);
    const double err = (fd - exact).lpNorm<Eigen::Infinity>() / std::max(1.0, exact.lpNorm<Eigen::Infinity>());
    ++r.cases;
    r.worst = std::max(r.worst, err);
    if (!(err <= tol)) {
      if (r.failures++ == 0) r.first_failure = p.text();
    }
  }
  return r;
}

namespace {

pl::ConeFactor random_factor(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kind(0, 4);
  std::uniform_real_distribution<double> end(-3.0, 3.0);
  switch (kind(rng)) {
    case 0: return pl::ConeFactor::zero();
    case 1: return pl::ConeFactor::nonpos();
    case 2: return pl::ConeFactor::nonneg();
    case 3: return pl::ConeFactor::line();
    default: {
      double a = end(rng);
      double b = end(rng);
      if (a > b) std::swap(a, b);
      return pl::ConeFactor::interval(a, b);
    }
  }
}

double member_coordinate(std::mt19937_64& rng, const pl::ConeFactor& f) {
  const double lo = std::isfinite(f.lo()) ? f.lo() : std::min(-10.0, f.hi());
  const double hi = std::isfinite(f.hi()) ? f.hi() : std::max(10.0, f.lo());
  return std::uniform_real_distribution<double>(lo, std::nextafter(hi, hi + 1.0))(rng);
}

}  // namespace

SuiteResult projection_optimality(int cases, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim(1, 4);
  std::uniform_real_distribution<double> coord(-6.0, 6.0);
  SuiteResult r;
  for (int k = 0; k < cases; ++k) {
    pl::ConeSet c;
    const int m = dim(rng);
    for (int i = 0; i < m; ++i) c.factors.push_back(random_factor(rng));
    Vec y(m);
    for (int i = 0; i < m; ++i) y[i] = coord(rng);
    const Vec p = pl::project_to_cone(y, c);
    bool ok = std::abs(pl::dist_to_cone(y, c) - (y - p).norm()) <= 1e-12;
    for (int i = 0; i < m; ++i) ok = ok && c.factors[i].contains(p[i]);
    const double d = (y - p).norm();
    for (int s = 0; s < 32; ++s) {
      Vec z(m);
      for (int i = 0; i < m; ++i) z[i] = member_coordinate(rng, c.factors[i]);
      ok = ok && d <= (y - z).norm() + 1e-12;
      // variational inequality for closed convex sets
      ok = ok && (y - p).dot(z - p) <= 1e-9;
    }
    ++r.cases;
    if (!ok && r.failures++ == 0) r.first_failure = "case " + std::to_string(k);
  }
  return r;
}

SuiteResult corpus_round_trip(const std::string& corpus_dir, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  SuiteResult r;
  auto fail = [&](const std::string& what) {
    if (r.failures++ == 0) r.first_failure = what;
  };
  for (const std::string& path : pl::corpus_files(corpus_dir)) {
    const pl::ProblemFile f = pl::load_problem_file(path);
    const std::string text = pl::format_problem_file(f);
    const pl::ProblemFile g = pl::parse_problem_file(text);
    ++r.cases;
    if (!pl::equivalent(f, g) || pl::format_problem_file(g) != text) fail(path);
    for (const auto& [name, e] : pl::expressions_of(f)) {
      const int dim = name.rfind("kinf.", 0) == 0 ? 1 : f.problem.n;
      const pl::Expression back = pl::parse(pl::to_string(e), dim);
      bool ok = pl::structurally_equal(e, back) && pl::to_string(back) == pl::to_string(e);
      for (int s = 0; s < 8; ++s) {
        Vec x(dim);
        for (int i = 0; i < dim; ++i) x[i] = coord(rng);
        const double a = pl::eval_or_inf(e, x);
        const double b = pl::eval_or_inf(back, x);
        ok = ok && (a == b || (std::isnan(a) && std::isnan(b)));
      }
      ++r.cases;
      if (!ok) fail(path + ": " + name);
    }
  }
  return r;
}

namespace {

double witness_residual(const pl::ResidualSpec& r, const Vec& x) { return pl::residual_or_inf(r, x); }

}  // namespace

SuiteResult certifier_consistency(const std::string& corpus_dir) {
  SuiteResult r;
  auto check = [&](bool ok, const std::string& what) {
    ++r.cases;
    if (!ok && r.failures++ == 0) r.first_failure = what;
  };
  for (const std::string& path : pl::corpus_files(corpus_dir)) {
    const pl::ProblemFile f = pl::load_problem_file(path);
    const pl::Problem& p = f.problem;
    const std::string tag = p.name + ": ";
    const pl::RunSettings s = pl::settings_from(f);
    const pl::ResidualSpec res = pl::default_residual(p.feasible);

    // f* is attained at a point of S within 1e-6
    const pl::MinimizeResult feas = pl::minimize_feasible(p, s.budget, s.seed);
    check(feas.status == pl::MinStatus::Finite, tag + "f* not finite");
    if (feas.status != pl::MinStatus::Finite) continue;
    check(pl::feasibility_residual(p.feasible, feas.best_point) <= 1e-6, tag + "f* witness infeasible");
    const double fstar = feas.best_value;

    // finite threshold ĉ ⟹ c = 2ĉ is not refuted
    pl::CStarOptions copt;
    copt.samples = s.samples;
    const pl::CStarEstimate est = pl::estimate_cstar(p, res, pl::PenaltySpec::plain(1), fstar, copt, s.seed);
    if (est.status == pl::CStarStatus::Finite) {
      const double c = std::max(2.0 * est.value, 1.0);
      const pl::Certificate cert = pl::certify_exactness(p, pl::PenaltySpec::plain(c), res, {s.budget, s.tol, copt}, s.seed);
      check(cert.status != pl::CertStatus::CounterexampleFound, tag + "counterexample above 2 c*");
    }

    // every declared certify case obeys the certificate invariants
    for (const auto& [group, params] : f.runs) {
      if (group.rfind("certify.", 0) != 0) continue;
      const pl::PenaltySpec pen = pl::parse_penalty(params.at("penalty"));
      const pl::Certificate cert = pl::certify_exactness(p, pen, res, {s.budget, s.tol, copt}, s.seed);
      if (cert.status == pl::CertStatus::CertifiedExactOnDomain) {
        check(std::abs(cert.penalized.best_value - cert.fstar) <= s.tol, tag + group + " gap");
        check(cert.cstar.status != pl::CStarStatus::Unbounded && cert.cstar.value <= pen.c * (1 + 1e-6),
              tag + group + " ratio above c");
        if (cert.argmin_checked) {
          const Vec& w = *cert.witness;
          check(witness_residual(res, w) <= 1e-6, tag + group + " argmin infeasible");
          check(std::abs(pl::eval_or_inf(p.objective, w) - cert.fstar) <= 1e-4, tag + group + " argmin value");
        }
      }
      if (cert.status == pl::CertStatus::UnboundedPenalized)
        check(cert.penalized.best_value < pl::kUnboundedThreshold, tag + group + " unbounded witness");
    }

    // diverging value function ⟹ no plain penalty certified
    if (std::holds_alternative<pl::ConeForm>(p.feasible)) {
      const auto m = static_cast<int>(std::get<pl::ConeForm>(p.feasible).cone.size());
      const pl::CalmnessScan scan = pl::scan_value_function(p, pl::default_u_grid(m), s.budget, s.seed);
      check(std::abs(scan.v0 - fstar) <= 1e-6, tag + "V(0) differs from f*");
      if (scan.diverging) {
        for (double c : {1.0, 10.0, 100.0, 1000.0}) {
          const pl::Certificate cert =
              pl::certify_exactness(p, pl::PenaltySpec::plain(c), res, {s.budget, s.tol, copt}, s.seed);
          check(cert.status != pl::CertStatus::CertifiedExactOnDomain, tag + "certified while not calm");
        }
      }
    }

    // fitted envelope exponents hold with 2 × the sampled constant on a fresh sample
    bool wants_envelope = false;
    for (const pl::Expectation& x : f.expectations) wants_envelope = wants_envelope || x.command == "envelope";
    if (wants_envelope) {
      const pl::ScalarFn obj = pl::as_function(p.objective);
      const pl::ScalarFn phi = f.phi ? pl::as_function(*f.phi) : pl::ScalarFn([obj, fstar](const Vec& x) {
        return std::max(fstar - obj(x), 0.0);
      });
      const pl::ScalarFn psi = [res](const Vec& x) { return pl::residual_or_inf(res, x); };
      const pl::EnvelopeFit fit = pl::fit_envelope(phi, psi, p.domain, {}, s.seed);
      check(fit.alpha_hat && fit.beta_hat, tag + "envelope exponents missing");
      if (fit.alpha_hat && fit.beta_hat) {
        const double r0 = p.domain.escape_scale;
        const auto a = pl::validate_envelope(phi, psi, p.n, *fit.alpha_hat, *fit.beta_hat, 100000, r0, 11);
        const auto b = pl::validate_envelope(phi, psi, p.n, *fit.alpha_hat, *fit.beta_hat, 100000, r0, 12);
        check(b.max_ratio <= 2.0 * a.max_ratio, tag + "envelope bound fails on fresh sample");
      }
    }
  }
  return r;
}

SuiteResult report_determinism(const std::string& corpus_dir) {
  SuiteResult r;
  const pl::CorpusRun a = pl::run_corpus(corpus_dir, {});
  const pl::CorpusRun b = pl::run_corpus(corpus_dir, {});
  r.cases = 2;
  if (pl::to_csv(a.report) != pl::to_csv(b.report)) {
    ++r.failures;
    r.first_failure = "csv differs";
  }
  if (pl::to_json(a.report) != pl::to_json(b.report)) {
    ++r.failures;
    if (r.first_failure.empty()) r.first_failure = "json differs";
  }
  return r;
}

double vd41_envelope(double t) {
  // on the level set x1² = s ∈ [0, √t] and φ = t − s² + s
  const double s = std::min(0.5, std::sqrt(t));
  return t - s * s + s;
}

double ex4ii_value(double u, double half_width) { return u == 0.0 ? 1.0 : std::exp(-std::abs(u) * half_width); }

double ex4ii_nu(double k) {
  const Vec x{{1.0 / k, -k}};
  const double e = std::exp(x[0] * x[1]);
  const Vec df{{e * x[1], e * x[0]}};
  const Vec dg{{1.0, 0.0}};
  // the norm is convex in lambda, so repeated grid zooms converge
  double best = std::numeric_limits<double>::infinity();
  for (double w : {1.0, -1.0}) {
    double lo = 0.0, hi = 1.0;
    for (int round = 0; round < 8; ++round) {
      const int grid = 10000;
      double arg = lo;
      for (int i = 0; i <= grid; ++i) {
        const double lambda = lo + (hi - lo) * i / grid;
        const double v = (lambda * df + (1.0 - lambda) * w * dg).norm();
        if (v < best) {
          best = v;
          arg = lambda;
        }
      }
      const double step = (hi - lo) / grid;
      lo = std::max(0.0, arg - 2 * step);
      hi = std::min(1.0, arg + 2 * step);
    }
  }
  return best;
}

double vd42ii_ratio(double alpha, double radius) {
  double best = 0.0;
  const int grid = 20000;
  const double lmin = std::log10(1e-6);
  const double lmax = std::log10(radius);
  for (int i = 0; i <= grid; ++i) {
    const double x = -std::pow(10.0, lmin + (lmax - lmin) * i / grid);
    const double psi = std::min(std::abs(x), 1.0);
    best = std::max(best, -x / std::pow(psi, alpha));
  }
  return best;
}

}  // namespace oracle
