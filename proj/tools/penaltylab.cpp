// penaltylab: command-line front end for the exact-penalty toolkit.

#include <CLI11.hpp>
#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "penaltylab/commands.hpp"
#include "penaltylab/corpus.hpp"
#include "penaltylab/errors.hpp"

namespace pl = penaltylab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct Common {
  std::string problem;
  std::vector<std::string> penalties;
  std::optional<int> starts;
  std::optional<int> iters;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  std::optional<double> escape;
  std::string budget;
  std::optional<double> tol;
  std::string out;
  std::string format = "csv";
  bool timing = false;
  std::string case_name;
  // command-specific
  std::string at;
  std::optional<double> threshold, kmax, u_max, epsilon, bound, delta, fstar;
  std::optional<int> validation_samples;
};

void add_budget_flags(CLI::App* app, Common& c) {
  app->add_option("--starts", c.starts, "Multistart count")->check(CLI::PositiveNumber);
  app->add_option("--iters", c.iters, "Iterations per local search")->check(CLI::PositiveNumber);
  app->add_option("--samples", c.samples, "Sample budget for the ratio estimate")->check(CLI::PositiveNumber);
  app->add_option("--seed", c.seed, "Random seed");
  app->add_option("--budget", c.budget, "STARTS,ITERS[,SAMPLES] in one flag");
  app->add_option("--tol", c.tol, "Value tolerance for certify")->check(CLI::PositiveNumber);
  app->add_flag("--timing", c.timing, "Record wall-clock times (reports are then not reproducible)");
}

void add_output_flags(CLI::App* app, Common& c) {
  app->add_option("--out", c.out, "Write the report here instead of stdout");
  app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_problem_flags(CLI::App* app, Common& c) {
  app->add_option("--problem", c.problem, "Problem file")->required();
  app->add_option("--escape-scale", c.escape, "Override the escape radius")->check(CLI::PositiveNumber);
  app->add_option("--case", c.case_name, "Take parameters from run.<command>.<case> in the file");
  add_budget_flags(app, c);
  add_output_flags(app, c);
}

void write_output(const std::string& text, const std::string& path) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw pl::UsageError("cannot write '" + path + "'");
  out << text;
}

void apply_budget(const Common& c, pl::RunSettings& s) {
  if (!c.budget.empty()) {
    std::vector<int> parts;
    std::stringstream ss(c.budget);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        parts.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw pl::UsageError("--budget expects STARTS,ITERS[,SAMPLES]");
      }
    }
    if (parts.size() < 2 || parts.size() > 3) throw pl::UsageError("--budget expects STARTS,ITERS[,SAMPLES]");
    for (int v : parts)
      if (v < 1) throw pl::UsageError("--budget values must be positive");
    s.budget.starts = parts[0];
    s.budget.iters = parts[1];
    if (parts.size() == 3) s.samples = parts[2];
  }
  if (c.starts) s.budget.starts = *c.starts;
  if (c.iters) s.budget.iters = *c.iters;
  if (c.samples) s.samples = *c.samples;
  if (c.seed) s.seed = *c.seed;
  if (c.tol) s.tol = *c.tol;
  s.timing = c.timing;
}

pl::RunParams collect_params(const std::string& command, const Common& c, const pl::ProblemFile& f) {
  pl::RunParams params;
  if (!c.case_name.empty()) {
    const auto it = f.runs.find(command + "." + c.case_name);
    if (it == f.runs.end()) throw pl::UsageError("no run." + command + "." + c.case_name + " in the problem file");
    params = it->second;
  }
  auto set_real = [&](const char* key, const std::optional<double>& v) {
    if (v) params[key] = pl::format_real(*v);
  };
  if (!c.penalties.empty()) {
    std::string joined;
    for (const std::string& p : c.penalties) joined += (joined.empty() ? "" : ";") + p;
    params["penalty"] = joined;
  }
  if (!c.at.empty()) params["at"] = c.at;
  set_real("threshold", c.threshold);
  set_real("kmax", c.kmax);
  set_real("u_max", c.u_max);
  set_real("epsilon", c.epsilon);
  set_real("bound", c.bound);
  set_real("delta", c.delta);
  set_real("fstar", c.fstar);
  if (c.validation_samples) params["validation_samples"] = std::to_string(*c.validation_samples);
  return params;
}

pl::Report run_on_problem(const std::string& command, const Common& c) {
  pl::ProblemFile f = pl::load_problem_file(c.problem);
  if (c.escape) {
    f.problem.domain.escape_scale = *c.escape;
    f.problem.domain.validate();
  }
  pl::RunSettings s = pl::settings_from(f);
  apply_budget(c, s);
  return pl::run_command(command, f, collect_params(command, c, f), s);
}

std::string render(const pl::Report& r, const std::string& format) {
  return format == "json" ? pl::to_json(r) : pl::to_csv(r);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of exact penalty functions on a searched domain"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pl::kToolVersion);

  Common c;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"certify", "Compare inf over S with the penalized infimum and test the ratio bound"},
      {"cstar", "Estimate the smallest penalty parameter satisfying the ratio bound"},
      {"envelope", "Fit the growth exponents of phi against psi near 0 and infinity"},
      {"calmness", "Scan the perturbed value function V(u)"},
      {"sequences", "Search for sequences of the first and second type"},
      {"distcond", "Probe the distance conditions between psi and S"},
      {"nu", "Estimate the asymptotic criticality measure at a point"},
      {"mfcq", "Check the constraint qualification at a feasible point"},
      {"kinf", "Search for asymptotic critical values at infinity"}};
  std::vector<std::pair<CLI::App*, std::string>> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_problem_flags(sub, c);
    subs.emplace_back(sub, name);
    if (name == "certify") sub->add_option("--penalty", c.penalties, "Penalty spec, e.g. plain(1.5); repeatable");
    if (name == "cstar") sub->add_option("--penalty", c.penalties, "Form of the effective residual")->expected(1);
    if (name == "envelope") sub->add_option("--validation-samples", c.validation_samples, "Points in the check sample");
    if (name == "calmness") {
      sub->add_option("--kmax", c.kmax, "Grid uses |u| = 10^-k for k = 0..kmax");
      sub->add_option("--u-max", c.u_max, "Drop grid points with |u| above this");
    }
    if (name == "sequences") {
      sub->add_option("--epsilon", c.epsilon, "Lower bound on phi for the first type (0 = automatic)");
      sub->add_option("--bound", c.bound, "Upper bound on psi for the second type");
    }
    if (name == "distcond") {
      sub->add_option("--delta", c.delta, "Distance that must persist for a violation of (C1)");
      sub->add_option("--bound", c.bound, "Upper bound on psi for (C2')");
    }
    if (name == "nu" || name == "mfcq") sub->add_option("--at", c.at, "Point as comma-separated coordinates")->required();
    if (name == "mfcq") sub->add_option("--threshold", c.threshold, "min_norm above this means MFCQ holds");
    if (name == "kinf") sub->add_option("--fstar", c.fstar, "Use this value of inf over S instead of computing it");
  }

  std::string corpus_dir;
  std::string filter = "*";
  CLI::App* corpus = app.add_subcommand("corpus", "Run the self-verifying example corpus");
  corpus->add_option("--dir", corpus_dir, "Directory holding *.problem files")->required();
  corpus->add_option("--filter", filter, "Glob on problem names");
  add_budget_flags(corpus, c);
  add_output_flags(corpus, c);

  std::string kind;
  std::string report_path;
  CLI::App* plot = app.add_subcommand("plotdata", "Emit a two-column series from a report or a fresh run");
  plot->add_option("--kind", kind, "c-sweep, loglog-envelope or calmness")
      ->required()
      ->check(CLI::IsMember({"c-sweep", "loglog-envelope", "calmness"}));
  plot->add_option("--report", report_path, "JSON report written with --format json");
  plot->add_option("--problem", c.problem, "Run the matching command on this problem instead");
  plot->add_option("--penalty", c.penalties, "Penalties for a c-sweep run; repeatable");
  plot->add_option("--escape-scale", c.escape, "Override the escape radius")->check(CLI::PositiveNumber);
  plot->add_option("--out", c.out, "Write the series here instead of stdout");
  add_budget_flags(plot, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    for (const auto& [sub, name] : subs) {
      if (sub->parsed()) {
        write_output(render(run_on_problem(name, c), c.format), c.out);
        return kExitOk;
      }
    }
    if (corpus->parsed()) {
      pl::CorpusOptions opt;
      opt.filter = filter;
      pl::RunSettings s;
      apply_budget(c, s);
      if (c.starts || !c.budget.empty()) opt.starts = s.budget.starts;
      if (c.iters || !c.budget.empty()) opt.iters = s.budget.iters;
      if (c.samples || std::count(c.budget.begin(), c.budget.end(), ',') == 2) opt.samples = s.samples;
      opt.seed = c.seed;
      opt.timing = c.timing;
      const pl::CorpusRun run = pl::run_corpus(corpus_dir, opt);
      write_output(render(run.report, c.format), c.out);
      return run.passed ? kExitOk : kExitFailed;
    }
    if (plot->parsed()) {
      pl::Report rep;
      if (!report_path.empty() == !c.problem.empty()) throw pl::UsageError("give exactly one of --report or --problem");
      if (!report_path.empty()) {
        std::ifstream in(report_path, std::ios::binary);
        if (!in) throw pl::UsageError("cannot open report '" + report_path + "'");
        std::stringstream buf;
        buf << in.rdbuf();
        rep = pl::report_from_json(buf.str());
      } else {
        const std::string command = kind == "c-sweep" ? "certify" : kind == "loglog-envelope" ? "envelope" : "calmness";
        rep = run_on_problem(command, c);
      }
      write_output(pl::emit_plotdata(rep, kind), c.out);
      return kExitOk;
    }
  } catch (const pl::ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitUsage;
  } catch (const pl::UsageError& e) {
    std::fprintf(stderr, "usage error: %s\n", e.what());
    return kExitUsage;
  } catch (const pl::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailed;
  }
  return kExitUsage;
}
