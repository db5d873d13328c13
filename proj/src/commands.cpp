#include "penaltylab/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "penaltylab/calmness.hpp"
#include "penaltylab/certifier.hpp"
#include "penaltylab/distcond.hpp"
#include "penaltylab/envelope.hpp"
#include "penaltylab/errors.hpp"
#include "penaltylab/sequences.hpp"
#include "penaltylab/variational.hpp"

namespace penaltylab {

namespace {

using Clock = std::chrono::steady_clock;

void check_params(const std::string& command, const RunParams& params, const std::set<std::string>& allowed) {
  for (const auto& [k, v] : params)
    if (allowed.count(k) == 0) throw UsageError("unknown parameter '" + k + "' for " + command);
}

std::string get(const RunParams& params, const std::string& key, const std::string& fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

double get_real(const RunParams& params, const std::string& key, double fallback) {
  const auto it = params.find(key);
  return it == params.end() ? fallback : parse_real(it->second);
}

std::vector<std::string> split_list(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

std::string digest(const std::string& command, const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  std::ostringstream d;
  d << format_problem_file(f) << "\ncommand=" << command;
  for (const auto& [k, v] : params) d << "\nparam." << k << "=" << v;
  d << "\nstarts=" << s.budget.starts << "\niters=" << s.budget.iters << "\nsamples=" << s.samples
    << "\nseed=" << s.seed << "\ntol=" << format_real(s.tol);
  return fnv1a_hex(d.str());
}

double fstar_of(const Problem& p, const RunSettings& s) {
  const MinimizeResult r = minimize_feasible(p, s.budget, s.seed);
  if (r.status == MinStatus::Infeasible) throw InfeasibleError("no feasible point found in the box");
  if (r.status == MinStatus::Unbounded) throw UsageError("objective is unbounded below on S");
  return r.best_value;
}

// φ from the file, else [f* − f]+
ScalarFn phi_of(const ProblemFile& f, const RunSettings& s, double* fstar_out) {
  if (f.phi) return as_function(*f.phi);
  const double fstar = fstar_of(f.problem, s);
  if (fstar_out) *fstar_out = fstar;
  const ScalarFn obj = as_function(f.problem.objective);
  return [obj, fstar](const Vec& x) {
    const double v = obj(x);
    return std::isfinite(v) ? std::max(fstar - v, 0.0) : 0.0;
  };
}

ScalarFn psi_of(const Problem& p) {
  const ResidualSpec r = default_residual(p.feasible);
  return [r](const Vec& x) { return residual_or_inf(r, x); };
}

bool problem_uses_exp(const ProblemFile& f) {
  for (const auto& [name, e] : expressions_of(f))
    if (name.rfind("kinf.", 0) != 0 && e.uses_exp()) return true;
  return false;
}

Vec point_param(const RunParams& params, const std::string& key, int n) {
  const auto it = params.find(key);
  if (it == params.end()) throw UsageError("missing parameter '" + key + "'");
  const Vec x = parse_point(it->second);
  if (x.size() != n) throw UsageError("point '" + it->second + "' needs " + std::to_string(n) + " coordinates");
  return x;
}

std::string alpha_cell(const PenaltySpec& p) { return p.form == PenaltyForm::Plain ? "1" : cell(p.alpha); }
std::string beta_cell(const PenaltySpec& p) { return p.form == PenaltyForm::TwoPower ? cell(p.beta) : "NA"; }

std::string cstar_cell(const CStarEstimate& e) {
  switch (e.status) {
    case CStarStatus::Finite: return cell(e.value);
    case CStarStatus::Unbounded: return "Unbounded";
    case CStarStatus::Inconclusive: break;
  }
  return "NA";
}

Report certify(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("certify", params, {"penalty"});
  Report rep;
  const ResidualSpec r = default_residual(f.problem.feasible);
  CertifyOptions opt;
  opt.budget = s.budget;
  opt.tol = s.tol;
  opt.cstar.samples = s.samples;
  for (const std::string& text : split_list(get(params, "penalty", "plain(1)"), ';')) {
    const PenaltySpec pen = parse_penalty(text);
    const auto t0 = Clock::now();
    const Certificate c = certify_exactness(f.problem, pen, r, opt, s.seed);
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    rep.add_row({{"problem", f.problem.name},
                 {"form", form_name(pen.form)},
                 {"c", cell(pen.c)},
                 {"alpha", alpha_cell(pen)},
                 {"beta", beta_cell(pen)},
                 {"fstar", cell(c.fstar)},
                 {"penalized_inf", c.penalized.status == MinStatus::Unbounded ? "Unbounded" : cell(c.penalized.best_value)},
                 {"status", to_string(c.status)},
                 {"witness_coords", c.witness ? cell(*c.witness) : ""},
                 {"wall_ms", s.timing ? cell(std::round(ms * 1e3) / 1e3) : "NA"},
                 {"cstar_estimate", cstar_cell(c.cstar)},
                 {"witness_kind", c.witness_kind},
                 {"argmin_checked", cell(c.argmin_checked)}});
  }
  return rep;
}

Report cstar(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("cstar", params, {"penalty"});
  Report rep;
  const PenaltySpec form = parse_penalty(get(params, "penalty", "plain(1)"));
  const double fstar = fstar_of(f.problem, s);
  CStarOptions opt;
  opt.samples = s.samples;
  const CStarEstimate e = estimate_cstar(f.problem, default_residual(f.problem.feasible), form, fstar, opt, s.seed);
  rep.summary = {{"problem", f.problem.name},
                 {"form", form_name(form.form)},
                 {"alpha", alpha_cell(form)},
                 {"beta", beta_cell(form)},
                 {"fstar", cell(fstar)},
                 {"status", to_string(e.status)},
                 {"cstar", cstar_cell(e)},
                 {"ratio_max", cell(e.value)},
                 {"samples", std::to_string(e.samples)},
                 {"witness_coords", e.witness.size() ? cell(e.witness) : ""}};
  for (std::size_t i = 0; i < e.path.size(); ++i)
    rep.add_row({{"step", std::to_string(i)}, {"x", cell(e.path[i])}});
  return rep;
}

Report envelope(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("envelope", params, {"validation_samples"});
  Report rep;
  double fstar = std::numeric_limits<double>::quiet_NaN();
  const ScalarFn phi = phi_of(f, s, &fstar);
  const ScalarFn psi = psi_of(f.problem);
  EnvelopeOptions opt;
  opt.starts = s.budget.starts;
  EnvelopeFit fit = fit_envelope(phi, psi, f.problem.domain, opt, s.seed);
  fit.non_semialgebraic = problem_uses_exp(f);
  const SingleExponentVerdict single = single_exponent_check(fit);

  std::string validation = "NA";
  if (fit.alpha_hat && fit.beta_hat) {
    const int n = static_cast<int>(get_real(params, "validation_samples", s.samples));
    const EnvelopeValidation v = validate_envelope(phi, psi, f.problem.n, *fit.alpha_hat, *fit.beta_hat, n,
                                                   f.problem.domain.escape_scale, s.seed);
    validation = cell(v.max_ratio);
  }
  rep.summary = {{"problem", f.problem.name},
                 {"phi", f.phi ? to_string(*f.phi) : "[fstar - f]+"},
                 {"fstar", f.phi ? "NA" : cell(fstar)},
                 {"alpha_hat", fit.alpha_hat ? cell(*fit.alpha_hat) : "NA"},
                 {"beta_hat", fit.beta_hat ? cell(*fit.beta_hat) : "NA"},
                 {"residual_zero", cell(fit.residual_zero)},
                 {"residual_inf", cell(fit.residual_inf)},
                 {"points_zero", std::to_string(fit.zero.size())},
                 {"points_inf", std::to_string(fit.inf.size())},
                 {"dropped", std::to_string(fit.dropped.size())},
                 {"validation_ratio", validation},
                 {"single_exponent_impossible", cell(single.impossible)},
                 {"non_semialgebraic", cell(fit.non_semialgebraic)}};
  if (fit.non_semialgebraic) rep.notes.push_back("exp present: monomial asymptotics are not guaranteed");
  for (const auto* branch : {&fit.zero, &fit.inf}) {
    for (const EnvelopeSample& e : *branch)
      rep.add_row({{"branch", branch == &fit.zero ? "zero" : "inf"},
                   {"t", cell(e.t)},
                   {"mu", cell(e.mu)},
                   {"argmax", cell(e.argmax)}});
  }
  return rep;
}

Report calmness(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("calmness", params, {"kmax", "u_max"});
  const auto* cf = std::get_if<ConeForm>(&f.problem.feasible);
  if (cf == nullptr) throw UsageError("calmness needs a cone-form problem");
  const int kmax = static_cast<int>(get_real(params, "kmax", 6));
  const double umax = get_real(params, "u_max", kInf);
  std::vector<Vec> grid;
  for (const Vec& u : default_u_grid(static_cast<int>(cf->cone.size()), kmax))
    if (u.norm() <= umax) grid.push_back(u);
  const CalmnessScan scan = scan_value_function(f.problem, grid, s.budget, s.seed);
  Report rep;
  rep.summary = {{"problem", f.problem.name},
                 {"v0", cell(scan.v0)},
                 {"modulus", cell(scan.modulus)},
                 {"diverging", cell(scan.diverging)},
                 {"points", std::to_string(scan.points.size())}};
  rep.add_row({{"u", cell(Vec(Vec::Zero(cf->cone.size())))},
               {"norm", cell(0.0)},
               {"status", "Finite"},
               {"value", cell(scan.v0)},
               {"quotient", "NA"}});
  for (const CalmnessPoint& pt : scan.points) {
    const bool finite = pt.status == MinStatus::Finite;
    rep.add_row({{"u", cell(pt.u)},
                 {"norm", cell(pt.norm)},
                 {"status", to_string(pt.status)},
                 {"value", finite ? cell(pt.value) : "NA"},
                 {"quotient", finite ? cell(pt.quotient) : "NA"}});
  }
  return rep;
}

void add_shell_rows(Report& rep, const std::string& kind, const std::vector<ShellPoint>& path, const char* phi_name) {
  for (const ShellPoint& sp : path)
    rep.add_row({{"path", kind}, {"radius", cell(sp.radius)}, {"x", cell(sp.x)}, {phi_name, cell(sp.phi)}, {"psi", cell(sp.psi)}});
}

Report sequences(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("sequences", params, {"epsilon", "bound"});
  SequenceOptions opt;
  opt.epsilon = get_real(params, "epsilon", 0.0);
  opt.psi_bound = get_real(params, "bound", 1.0);
  const ScalarFn phi = phi_of(f, s, nullptr);
  const SequenceVerdict v = probe_sequence_types(phi, psi_of(f.problem), f.problem.domain, opt, s.seed);
  Report rep;
  auto last = [](const std::vector<ShellPoint>& p, bool want_phi) {
    return p.empty() ? std::string("NA") : cell(want_phi ? p.back().phi : p.back().psi);
  };
  rep.summary = {{"problem", f.problem.name},
                 {"first_type", cell(v.first_found)},
                 {"second_type", cell(v.second_found)},
                 {"epsilon_used", cell(v.epsilon_used)},
                 {"bound_used", cell(v.bound_used)},
                 {"first_terminal_psi", last(v.first_path, false)},
                 {"first_terminal_phi", last(v.first_path, true)},
                 {"second_terminal_psi", last(v.second_path, false)},
                 {"second_terminal_phi", last(v.second_path, true)}};
  add_shell_rows(rep, "first", v.first_path, "phi");
  add_shell_rows(rep, "second", v.second_path, "phi");
  return rep;
}

Report distcond(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("distcond", params, {"delta", "bound"});
  DistCondOptions opt;
  opt.delta = get_real(params, "delta", 1.0);
  opt.psi_bound = get_real(params, "bound", 1.0);
  const DistCondReport d = probe_distance_conditions(f.problem, default_residual(f.problem.feasible), opt, s.seed);
  Report rep;
  const bool ok = d.status == DistCondStatus::Evaluated;
  rep.summary = {{"problem", f.problem.name},
                 {"status", ok ? "Evaluated" : "Inconclusive"},
                 {"c1_holds", ok ? cell(d.c1_holds) : "NA"},
                 {"c2_holds", ok ? cell(d.c2_holds) : "NA"},
                 {"s_sample_size", std::to_string(d.s_sample_size)},
                 {"delta", cell(d.delta)},
                 {"bound", cell(d.psi_bound)}};
  add_shell_rows(rep, "c1", d.c1_path, "dist");
  add_shell_rows(rep, "c2", d.c2_path, "dist");
  return rep;
}

Report nu(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("nu", params, {"at"});
  const Vec x = point_param(params, "at", f.problem.n);
  NuOptions opt;
  opt.cloud.seed = s.seed;
  const NuProbe probe = nu_estimate(f.problem, x, opt);
  Report rep;
  rep.notes.push_back(std::string("normal directions: ") + kNormalInterpretation);
  rep.summary = {{"problem", f.problem.name},
                 {"x", cell(x)},
                 {"nu_hat", cell(probe.nu_hat)},
                 {"empty_normals", cell(probe.empty_normals)},
                 {"lambda", probe.empty_normals ? "NA" : cell(probe.lambda)},
                 {"w", cell(probe.w)},
                 {"u", cell(probe.u)},
                 {"v", cell(probe.v)}};
  return rep;
}

Report mfcq(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("mfcq", params, {"at", "threshold"});
  const Vec x = point_param(params, "at", f.problem.n);
  NuOptions opt;
  opt.cloud.seed = s.seed;
  const MfcqReport m = mfcq_check(f.problem, x, get_real(params, "threshold", 1e-3), opt);
  Report rep;
  rep.summary = {{"problem", f.problem.name},
                 {"x", cell(x)},
                 {"holds", cell(m.holds)},
                 {"min_norm", cell(m.min_norm)},
                 {"threshold", cell(m.threshold)},
                 {"w", cell(m.w)}};
  return rep;
}

Report kinf(const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  check_params("kinf", params, {"fstar"});
  const double fstar = params.count("fstar") ? get_real(params, "fstar", 0.0) : fstar_of(f.problem, s);
  KInfOptions opt;
  opt.path_family = f.kinf_paths;
  const KInfinityReport k = k_infinity_probe(f.problem, fstar, opt, s.seed);
  Report rep;
  rep.notes.push_back(std::string("normal directions: ") + kNormalInterpretation);
  rep.summary = {{"problem", f.problem.name},
                 {"fstar", cell(fstar)},
                 {"c2_verdict", k.violated ? "ViolatedWithWitness" : "HoldsOnProbes"},
                 {"witness_t", k.violated ? cell(k.witness_t) : "NA"},
                 {"cluster_values", std::to_string(k.cluster_values.size())},
                 {"paths", std::to_string(k.paths.size())}};
  for (const ClusterValue& c : k.cluster_values)
    rep.add_row({{"source", c.source},
                 {"level", cell(c.level)},
                 {"t", cell(c.t)},
                 {"norm", cell(c.norm)},
                 {"norm_nu", cell(c.norm_nu)},
                 {"f", cell(c.f)},
                 {"dist", cell(c.dist)},
                 {"x", cell(c.x)},
                 {"cloud_seed", std::to_string(c.cloud_seed)}});
  return rep;
}

std::size_t column_index(const Report& r, const std::string& name) {
  for (std::size_t i = 0; i < r.columns.size(); ++i)
    if (r.columns[i] == name) return i;
  throw UsageError("report has no column '" + name + "'");
}

double numeric(const std::string& s) {
  if (s == "Unbounded") return -kInf;
  return parse_real(s);
}

}  // namespace

RunSettings settings_from(const ProblemFile& f) {
  RunSettings s;
  s.budget = f.budget;
  s.samples = f.samples;
  s.seed = f.seed;
  return s;
}

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names{"certify", "cstar", "envelope", "calmness", "sequences",
                                              "distcond", "nu", "mfcq", "kinf"};
  return names;
}

Report run_command(const std::string& command, const ProblemFile& f, const RunParams& params, const RunSettings& s) {
  Report rep;
  if (command == "certify") rep = certify(f, params, s);
  else if (command == "cstar") rep = cstar(f, params, s);
  else if (command == "envelope") rep = envelope(f, params, s);
  else if (command == "calmness") rep = calmness(f, params, s);
  else if (command == "sequences") rep = sequences(f, params, s);
  else if (command == "distcond") rep = distcond(f, params, s);
  else if (command == "nu") rep = nu(f, params, s);
  else if (command == "mfcq") rep = mfcq(f, params, s);
  else if (command == "kinf") rep = kinf(f, params, s);
  else throw UsageError("unknown command '" + command + "'");
  rep.command = command;
  rep.inputs_digest = digest(command, f, params, s);
  rep.notes.insert(rep.notes.begin(), "verdicts refer to the searched box and escape probes only");
  return rep;
}

std::string emit_plotdata(const Report& r, const std::string& kind) {
  std::ostringstream out;
  if (kind == "c-sweep") {
    const std::size_t ic = column_index(r, "c");
    const std::size_t ifs = column_index(r, "fstar");
    const std::size_t ip = column_index(r, "penalized_inf");
    out << "# c gap\n";
    for (const auto& row : r.rows) out << row[ic] << " " << cell(numeric(row[ifs]) - numeric(row[ip])) << "\n";
  } else if (kind == "loglog-envelope") {
    const std::size_t ib = column_index(r, "branch");
    const std::size_t it = column_index(r, "t");
    const std::size_t im = column_index(r, "mu");
    out << "# log10_t log10_mu\n";
    std::string branch;
    for (const auto& row : r.rows) {
      if (row[ib] != branch) {
        if (!branch.empty()) out << "\n\n";
        branch = row[ib];
        out << "# branch " << branch << "\n";
      }
      out << cell(std::log10(numeric(row[it]))) << " " << cell(std::log10(numeric(row[im]))) << "\n";
    }
  } else if (kind == "calmness") {
    const std::size_t in = column_index(r, "norm");
    const std::size_t iv = column_index(r, "value");
    out << "# norm_u value\n";
    for (const auto& row : r.rows)
      if (row[iv] != "NA") out << row[in] << " " << row[iv] << "\n";
  } else {
    throw UsageError("unknown plot kind '" + kind + "'");
  }
  return out.str();
}

}  // namespace penaltylab
