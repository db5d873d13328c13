#include "penaltylab/corpus.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <map>

#include "penaltylab/errors.hpp"

namespace penaltylab {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::optional<double> as_number(const std::string& s) {
  try {
    return parse_real(s);
  } catch (const ParseError&) {
    return std::nullopt;
  }
}

}  // namespace

bool matches(const std::string& matcher, const std::string& actual) {
  const std::string m = trim(matcher);
  const std::optional<double> v = as_number(actual);
  if (m.rfind("in ", 0) == 0) {
    const std::string body = trim(m.substr(3));
    const auto comma = body.find(',');
    if (body.size() < 2 || body.front() != '[' || body.back() != ']' || comma == std::string::npos)
      throw ParseError("interval matcher must look like 'in [lo, hi]'", 0);
    const double lo = parse_real(body.substr(1, comma - 1));
    const double hi = parse_real(body.substr(comma + 1, body.size() - comma - 2));
    return v && *v >= lo && *v <= hi;
  }
  for (const char* op : {"<=", ">=", "<", ">"}) {
    const std::string o = op;
    if (m.rfind(o, 0) == 0) {
      const double bound = parse_real(m.substr(o.size()));
      if (!v) return false;
      if (o == "<=") return *v <= bound;
      if (o == ">=") return *v >= bound;
      if (o == "<") return *v < bound;
      return *v > bound;
    }
  }
  const auto pm = m.find("+-");
  if (pm != std::string::npos) {
    const double centre = parse_real(m.substr(0, pm));
    const double tol = parse_real(m.substr(pm + 2));
    return v && std::abs(*v - centre) <= tol;
  }
  return m == actual;
}

std::vector<std::string> corpus_files(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw UsageError("corpus directory '" + dir + "' not found");
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".problem") out.push_back(e.path().string());
  std::sort(out.begin(), out.end());
  return out;
}

CorpusRun run_corpus(const std::string& dir, const CorpusOptions& opt) {
  std::vector<ProblemFile> files;
  std::vector<std::string> paths;
  for (const std::string& path : corpus_files(dir)) {
    ProblemFile f = load_problem_file(path);
    if (fnmatch(opt.filter.c_str(), f.problem.name.c_str(), 0) != 0) continue;
    files.push_back(std::move(f));
    paths.push_back(path);
  }
  std::vector<std::size_t> order(files.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return files[a].problem.name < files[b].problem.name; });

  CorpusRun run;
  run.report.command = "corpus";
  std::string all_digests;
  for (std::size_t idx : order) {
    const ProblemFile& f = files[idx];
    RunSettings s = settings_from(f);
    if (opt.starts) s.budget.starts = *opt.starts;
    if (opt.iters) s.budget.iters = *opt.iters;
    if (opt.samples) s.samples = *opt.samples;
    if (opt.seed) s.seed = *opt.seed;

    CorpusEntry entry;
    entry.name = f.problem.name;
    entry.path = paths[idx];
    const auto t0 = std::chrono::steady_clock::now();

    // one run per (command, case), in order of first appearance
    std::vector<std::string> groups;
    for (const Expectation& x : f.expectations) {
      const std::string g = x.command + "." + (x.case_name.empty() ? "default" : x.case_name);
      if (std::find(groups.begin(), groups.end(), g) == groups.end()) groups.push_back(g);
    }
    for (const std::string& g : groups) {
      const std::string command = g.substr(0, g.find('.'));
      const auto it = f.runs.find(g);
      const RunParams params = it == f.runs.end() ? RunParams{} : it->second;
      std::optional<Report> rep;
      std::string error;
      try {
        rep = run_command(command, f, params, s);
        all_digests += rep->inputs_digest;
      } catch (const Error& e) {
        error = std::string("error: ") + e.what();
      }
      for (const Expectation& x : f.expectations) {
        if (x.command + "." + (x.case_name.empty() ? "default" : x.case_name) != g) continue;
        CheckResult c;
        c.expectation = x;
        c.actual = rep ? rep->lookup(x.field) : error;
        c.passed = rep && !c.actual.empty() && matches(x.matcher, c.actual);
        entry.passed = entry.passed && c.passed;
        entry.checks.push_back(std::move(c));
      }
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    std::string details;
    int failed = 0;
    for (const CheckResult& c : entry.checks) {
      if (!c.passed) ++failed;
      if (!details.empty()) details += "; ";
      details += (c.passed ? "" : "FAIL ") + c.expectation.command + "." +
                 (c.expectation.case_name.empty() ? "" : c.expectation.case_name + ".") + c.expectation.field + "=" +
                 c.actual + " (" + c.expectation.matcher + ")";
    }
    run.report.add_row({{"problem", entry.name},
                        {"checks", std::to_string(entry.checks.size())},
                        {"failed", std::to_string(failed)},
                        {"status", entry.passed ? "pass" : "fail"},
                        {"wall_ms", opt.timing ? cell(std::round(ms)) : "NA"},
                        {"details", details}});
    run.passed = run.passed && entry.passed;
    run.entries.push_back(std::move(entry));
  }
  run.report.inputs_digest = fnv1a_hex(all_digests + "|filter=" + opt.filter);
  run.report.summary = {{"entries", std::to_string(run.entries.size())}, {"passed", cell(run.passed)}};
  return run;
}

}  // namespace penaltylab
