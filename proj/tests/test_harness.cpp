#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "penaltylab/commands.hpp"
#include "penaltylab/corpus.hpp"
#include "penaltylab/errors.hpp"
#include "penaltylab/report.hpp"
#include "support/fixtures.hpp"

using namespace penaltylab;
namespace fs = std::filesystem;

namespace {

const std::string kCli = PENALTYLAB_CLI;
const std::string kCorpus = PENALTYLAB_CORPUS_DIR;

int cli(const std::string& args) {
  const int raw = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / name) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

std::vector<std::pair<double, double>> series(const std::string& text) {
  std::vector<std::pair<double, double>> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double a = 0, b = 0;
    ls >> a >> b;
    out.emplace_back(a, b);
  }
  return out;
}

}  // namespace

TEST_CASE("expectation matchers") {
  CHECK(matches("in [0.4, 0.6]", "0.5"));
  CHECK_FALSE(matches("in [0.4, 0.6]", "0.61"));
  CHECK(matches("<= 1e-2", "0.01"));
  CHECK_FALSE(matches("< 1e-2", "0.01"));
  CHECK(matches(">= 10", "1e7"));
  CHECK(matches("> 0.99", "1"));
  CHECK(matches("0.36788 +- 0.05", "0.367879441171"));
  CHECK_FALSE(matches("1 +- 1e-6", "1.00001"));
  CHECK(matches("CertifiedExactOnDomain", "CertifiedExactOnDomain"));
  CHECK_FALSE(matches("<= 1", "Unbounded"));
  CHECK_FALSE(matches("true", "false"));
  CHECK_THROWS_AS(matches("in [1", "1"), ParseError);
}

TEST_CASE("report cells and hashes") {
  CHECK(cell(0.1) == "0.1");
  CHECK(cell(kInf) == "inf");
  CHECK(cell(-kInf) == "-inf");
  CHECK(cell(std::nan("")) == "nan");
  CHECK(cell(Vec{{1.0, -2.5}}) == "1;-2.5");
  CHECK(cell(true) == "true");
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("CSV and JSON renderings carry the same report") {
  Report r;
  r.command = "demo";
  r.inputs_digest = "0123";
  r.notes = {"a note"};
  r.summary = {{"status", "Finite"}};
  r.add_row({{"x", "1"}, {"y", "a,b"}});
  r.add_row({{"x", "2"}, {"y", "c"}});
  CHECK(r.lookup("status") == "Finite");
  CHECK(r.lookup("x") == "1");
  CHECK(r.lookup("missing").empty());
  const std::string csv = to_csv(r);
  CHECK(csv.find("# command: demo\n") != std::string::npos);
  CHECK(csv.find("# note: a note\n") != std::string::npos);
  CHECK(csv.find("x,y\n1,\"a,b\"\n2,c\n") != std::string::npos);
  const Report back = report_from_json(to_json(r));
  CHECK(to_csv(back) == csv);
  CHECK(to_json(back) == to_json(r));
  CHECK_THROWS_AS(report_from_json("{not json"), Error);
}

TEST_CASE("commands reject unknown names and parameters") {
  const ProblemFile f = fixture::corpus("ex4iii");
  CHECK_THROWS_AS(run_command("bogus", f, {}, settings_from(f)), UsageError);
  CHECK_THROWS_AS(run_command("mfcq", f, {{"at", "0,0"}, {"colour", "red"}}, settings_from(f)), UsageError);
  CHECK_THROWS_AS(run_command("nu", f, {{"at", "0"}}, settings_from(f)), Error);
  CHECK(command_names().size() == 9);
}

TEST_CASE("reports are reproducible and timing is opt-in") {
  const ProblemFile f = fixture::corpus("ex4iii");
  RunSettings s = settings_from(f);
  const Report a = run_command("certify", f, {{"penalty", "plain(1.5);plain(0.5)"}}, s);
  const Report b = run_command("certify", f, {{"penalty", "plain(1.5);plain(0.5)"}}, s);
  CHECK(to_csv(a) == to_csv(b));
  CHECK(a.rows.size() == 2);
  CHECK(a.lookup("wall_ms") == "NA");
  CHECK(a.columns == std::vector<std::string>{"problem", "form", "c", "alpha", "beta", "fstar", "penalized_inf", "status",
                                              "witness_coords", "wall_ms", "cstar_estimate", "witness_kind",
                                              "argmin_checked"});
  s.timing = true;
  CHECK(run_command("certify", f, {{"penalty", "plain(1.5)"}}, s).lookup("wall_ms") != "NA");
  s.timing = false;
  s.seed = 2;
  CHECK(run_command("certify", f, {{"penalty", "plain(1.5)"}}, s).inputs_digest != a.inputs_digest);
}

TEST_CASE("corpus filter and results") {
  CorpusOptions opt;
  opt.filter = "ex4*";
  const CorpusRun run = run_corpus(kCorpus, opt);
  REQUIRE(run.entries.size() == 4);
  CHECK(run.passed);
  CHECK(run.report.rows.size() == 4);
  CHECK(run.entries[0].name == "ex4i");
  CHECK(run.entries[3].name == "ex4iv");

  opt.filter = "vd41";
  const CorpusRun vd = run_corpus(kCorpus, opt);
  REQUIRE(vd.entries.size() == 1);
  CHECK(vd.report.lookup("details").find("alpha_hat=") != std::string::npos);

  opt.filter = "no-such-problem";
  const CorpusRun none = run_corpus(kCorpus, opt);
  CHECK(none.entries.empty());
  CHECK(none.passed);
  CHECK(none.report.lookup("entries") == "0");

  opt.filter = "ex4*";
  const CorpusRun again = run_corpus(kCorpus, opt);
  CHECK(to_csv(again.report) == to_csv(run.report));
}

TEST_CASE("a failing expectation fails the corpus") {
  TempDir dir("penaltylab_failing_corpus");
  std::string text = slurp(kCorpus + "/ex4iii.problem");
  text += "expect.cstar.status = Unbounded\n";
  std::ofstream(dir.path / "ex4iii.problem") << text;
  const CorpusRun run = run_corpus(dir.path.string(), {});
  CHECK_FALSE(run.passed);
  CHECK(run.report.lookup("status") == "fail");
  CHECK(run.report.lookup("details").find("FAIL cstar.status=Finite") != std::string::npos);
  CHECK(cli("corpus --dir " + dir.path.string()) == 1);
}

TEST_CASE("plot data from fresh runs") {
  const ProblemFile iii = fixture::corpus("ex4iii");
  const Report sweep = run_command("certify", iii, {{"penalty", "plain(0.5);plain(1);plain(1.5);plain(3)"}},
                                   settings_from(iii));
  const auto gaps = series(emit_plotdata(sweep, "c-sweep"));
  REQUIRE(gaps.size() == 4);
  for (const auto& [c, gap] : gaps) {
    CAPTURE(c);
    if (c == 0.5)
      CHECK(gap > 0.0);
    else
      CHECK(std::abs(gap) <= 1e-6);
  }

  const ProblemFile vd = fixture::corpus("vd41");
  const auto pts = series(emit_plotdata(run_command("envelope", vd, {}, settings_from(vd)), "loglog-envelope"));
  REQUIRE(pts.size() >= 6);
  // slope between the two smallest t of the zero branch
  const double slope = (pts[1].second - pts[0].second) / (pts[1].first - pts[0].first);
  CHECK(slope == doctest::Approx(0.5).epsilon(0.05));

  const ProblemFile ii = fixture::corpus("ex4ii");
  const auto cal = series(emit_plotdata(run_command("calmness", ii, {}, settings_from(ii)), "calmness"));
  REQUIRE_FALSE(cal.empty());
  CHECK(cal[0].first == 0.0);
  CHECK(cal[0].second == doctest::Approx(1.0).epsilon(1e-6));
  for (std::size_t i = 1; i < cal.size(); ++i)
    if (cal[i].first >= 1e-3) CHECK(cal[i].second <= 1e-4);
  CHECK_THROWS_AS(emit_plotdata(sweep, "histogram"), UsageError);
  CHECK_THROWS_AS(emit_plotdata(sweep, "calmness"), UsageError);
}

TEST_CASE("command-line exit codes") {
  TempDir dir("penaltylab_cli");
  const std::string ex = kCorpus + "/ex4iii.problem";
  CHECK(cli("--version") == 0);
  CHECK(cli("") == 2);
  CHECK(cli("certify") == 2);
  CHECK(cli("certify --problem " + ex + " --penalty 'plain(1.5)'") == 0);
  CHECK(cli("certify --problem " + ex + " --penalty 'plain(-1)'") == 2);
  CHECK(cli("certify --problem " + ex + " --budget 4") == 2);
  CHECK(cli("mfcq --problem " + ex + " --at 1,0") == 2);
  CHECK(cli("certify --problem /nonexistent.problem") == 2);

  std::ofstream(dir.path / "bad.problem") << "name = bad\nn = 1\nobjective = x0\n"
                                             "constraint.0.expr = x0\nconstraint.0.cone = interval(2,1)\n";
  CHECK(cli("certify --problem " + (dir.path / "bad.problem").string()) == 2);

  std::ofstream(dir.path / "none.problem") << "name = none\nn = 1\nobjective = x0\n"
                                              "constraint.0.expr = x0^2 + 1\nconstraint.0.cone = zero\n";
  CHECK(cli("certify --problem " + (dir.path / "none.problem").string()) == 1);

  CHECK(cli("corpus --dir " + kCorpus + " --filter 'ex4*'") == 0);
  CHECK(cli("corpus --dir " + kCorpus + " --filter ''") == 0);
  CHECK(cli("corpus --dir /nonexistent") == 2);

  const fs::path json = dir.path / "sweep.json";
  CHECK(cli("certify --problem " + ex + " --penalty 'plain(0.5)' --penalty 'plain(1.5)' --format json --out " +
            json.string()) == 0);
  const fs::path plot = dir.path / "sweep.dat";
  CHECK(cli("plotdata --kind c-sweep --report " + json.string() + " --out " + plot.string()) == 0);
  CHECK(series(slurp(plot)).size() == 2);
  CHECK(cli("plotdata --kind c-sweep") == 2);
}
