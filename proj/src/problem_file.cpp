#include "penaltylab/problem_file.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "penaltylab/errors.hpp"

namespace penaltylab {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
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

// what() of a ParseError without its trailing " at offset N"
std::string raw_message(const ParseError& e) {
  std::string msg = e.what();
  const std::string suffix = " at offset " + std::to_string(e.offset());
  if (msg.size() >= suffix.size() && msg.compare(msg.size() - suffix.size(), suffix.size(), suffix) == 0)
    msg.resize(msg.size() - suffix.size());
  return msg;
}

struct Entry {
  std::string key;
  std::string value;
  std::size_t line = 0;
  std::size_t value_col = 0;
};

[[noreturn]] void fail(const Entry& e, const std::string& what, std::size_t col = 0) {
  throw ParseError(e.key + ": " + what, e.value_col + col, e.line);
}

Expression parse_expr(const Entry& e, int n) {
  try {
    return parse(e.value, n);
  } catch (const ParseError& pe) {
    fail(e, raw_message(pe), pe.offset());
  }
}

long parse_int(const Entry& e) {
  char* end = nullptr;
  const long v = std::strtol(e.value.c_str(), &end, 10);
  if (e.value.empty() || *end != '\0') fail(e, "expected an integer");
  return v;
}

int parse_index(const Entry& e, const std::string& part) {
  if (part.empty() || !std::all_of(part.begin(), part.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
    fail(e, "expected a numeric index in the key");
  return std::stoi(part);
}

bool is_identifier(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
    return std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-';
  });
}

std::string format_box(const Vec& v) {
  if (v.size() > 0 && (v.array() == v[0]).all()) return format_real(v[0]);
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_real(v[i]);
  return out;
}

}  // namespace

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

double parse_real(const std::string& text) {
  const std::string t = trim(text);
  const std::size_t slash = t.find('/');
  auto one = [](const std::string& s) {
    const std::string u = trim(s);
    char* end = nullptr;
    const double v = std::strtod(u.c_str(), &end);
    if (u.empty() || *end != '\0') throw ParseError("expected a number, got '" + u + "'", 0);
    return v;
  };
  if (slash == std::string::npos) return one(t);
  const double den = one(t.substr(slash + 1));
  if (den == 0.0) throw ParseError("zero denominator", slash);
  return one(t.substr(0, slash)) / den;
}

Vec parse_point(const std::string& text) {
  std::string t = trim(text);
  if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
  const std::vector<std::string> parts = split(t, ',');
  Vec x(static_cast<Eigen::Index>(parts.size()));
  for (std::size_t i = 0; i < parts.size(); ++i) x[static_cast<Eigen::Index>(i)] = parse_real(parts[i]);
  return x;
}

ProblemFile parse_problem_file(const std::string& text) {
  std::vector<Entry> entries;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = raw.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", 0, lineno);
    Entry e;
    e.key = trim(raw.substr(0, eq));
    e.line = lineno;
    std::size_t vstart = eq + 1;
    while (vstart < raw.size() && std::isspace(static_cast<unsigned char>(raw[vstart]))) ++vstart;
    e.value_col = vstart;
    e.value = trim(raw.substr(eq + 1));
    if (e.key.empty()) throw ParseError("empty key", 0, lineno);
    if (!seen.insert(e.key).second) throw ParseError("duplicate key '" + e.key + "'", 0, lineno);
    entries.push_back(std::move(e));
  }

  ProblemFile f;
  Problem& p = f.problem;
  const Entry* n_entry = nullptr;
  for (const Entry& e : entries)
    if (e.key == "n") n_entry = &e;
  if (n_entry == nullptr) throw ParseError("missing key 'n'", 0, lineno);
  const long n = parse_int(*n_entry);
  if (n < 1) fail(*n_entry, "dimension must be positive");
  p.n = static_cast<int>(n);

  bool have_objective = false;
  std::optional<Expression> residual;
  std::map<int, std::pair<std::optional<Expression>, std::optional<ConeFactor>>> constraints;
  std::map<int, const Entry*> constraint_lines;
  std::optional<Vec> lo;
  std::optional<Vec> hi;
  double escape = kDefaultEscapeScale;
  std::map<int, std::vector<Expression>> paths;

  auto box_vec = [&](const Entry& e) {
    Vec v;
    try {
      v = parse_point(e.value);
    } catch (const ParseError& pe) {
      fail(e, raw_message(pe));
    }
    if (v.size() == 1) return Vec(Vec::Constant(p.n, v[0]));
    if (v.size() != p.n) fail(e, "box needs 1 or n values");
    return v;
  };
  auto real = [&](const Entry& e) {
    try {
      return parse_real(e.value);
    } catch (const ParseError& pe) {
      fail(e, raw_message(pe));
    }
  };

  for (const Entry& e : entries) {
    const std::vector<std::string> parts = split(e.key, '.');
    if (e.key == "n") continue;
    if (e.key == "name") {
      if (!is_identifier(e.value)) fail(e, "name must be a plain identifier");
      p.name = e.value;
    } else if (e.key == "objective") {
      p.objective = parse_expr(e, p.n);
      have_objective = true;
    } else if (e.key == "residual") {
      residual = parse_expr(e, p.n);
    } else if (e.key == "phi") {
      f.phi = parse_expr(e, p.n);
    } else if (parts[0] == "constraint" && parts.size() == 3) {
      const int i = parse_index(e, parts[1]);
      constraint_lines[i] = &e;
      if (parts[2] == "expr") {
        constraints[i].first = parse_expr(e, p.n);
      } else if (parts[2] == "cone") {
        try {
          constraints[i].second = parse_factor(e.value);
        } catch (const ParseError& pe) {
          fail(e, raw_message(pe), pe.offset());
        } catch (const UsageError& ue) {
          fail(e, ue.what());
        }
      } else {
        fail(e, "unknown constraint field '" + parts[2] + "'");
      }
    } else if (e.key == "box.lo") {
      lo = box_vec(e);
    } else if (e.key == "box.hi") {
      hi = box_vec(e);
    } else if (e.key == "escape_scale") {
      escape = real(e);
    } else if (e.key == "budget.starts") {
      f.budget.starts = static_cast<int>(parse_int(e));
    } else if (e.key == "budget.iters") {
      f.budget.iters = static_cast<int>(parse_int(e));
    } else if (e.key == "budget.samples") {
      f.samples = static_cast<int>(parse_int(e));
    } else if (e.key == "seed") {
      const long s = parse_int(e);
      if (s < 0) fail(e, "seed must be nonnegative");
      f.seed = static_cast<std::uint64_t>(s);
    } else if (parts[0] == "kinf" && parts.size() == 3 && parts[1] == "path") {
      const int i = parse_index(e, parts[2]);
      std::vector<Expression> curve;
      std::size_t col = 0;
      for (const std::string& piece : split(e.value, ',')) {
        try {
          curve.push_back(parse(piece, 1));
        } catch (const ParseError& pe) {
          fail(e, raw_message(pe), col + pe.offset());
        }
        col += piece.size() + 1;
      }
      if (static_cast<int>(curve.size()) != p.n) fail(e, "a path needs n comma-separated expressions");
      paths[i] = std::move(curve);
    } else if (parts[0] == "run" && parts.size() == 4) {
      if (!is_identifier(parts[1]) || !is_identifier(parts[2]) || !is_identifier(parts[3])) fail(e, "malformed run key");
      f.runs[parts[1] + "." + parts[2]][parts[3]] = e.value;
    } else if (parts[0] == "expect" && (parts.size() == 3 || parts.size() == 4)) {
      for (std::size_t k = 1; k < parts.size(); ++k)
        if (!is_identifier(parts[k])) fail(e, "malformed expect key");
      Expectation x;
      x.command = parts[1];
      x.case_name = parts.size() == 4 ? parts[2] : "";
      x.field = parts.back();
      x.matcher = e.value;
      f.expectations.push_back(std::move(x));
    } else {
      fail(e, "unknown key");
    }
  }

  if (p.name.empty()) throw ParseError("missing key 'name'", 0, lineno);
  if (!have_objective) throw ParseError("missing key 'objective'", 0, lineno);
  if (residual && !constraints.empty()) throw ParseError("give either constraints or a residual, not both", 0, lineno);
  if (residual) {
    p.feasible = ResidualForm{*residual};
  } else {
    if (constraints.empty()) throw ParseError("missing constraints or residual", 0, lineno);
    ConeForm cf;
    int expect_index = 0;
    for (auto& [i, c] : constraints) {
      const Entry& e = *constraint_lines[i];
      if (i != expect_index) fail(e, "constraint indices must be 0, 1, 2, ...");
      if (!c.first) fail(e, "constraint " + std::to_string(i) + " has no expr");
      if (!c.second) fail(e, "constraint " + std::to_string(i) + " has no cone");
      cf.g.push_back(*c.first);
      cf.cone.factors.push_back(*c.second);
      ++expect_index;
    }
    p.feasible = std::move(cf);
  }
  int expect_path = 0;
  for (auto& [i, curve] : paths) {
    if (i != expect_path++) throw ParseError("kinf.path indices must be 0, 1, 2, ...", 0, lineno);
    f.kinf_paths.push_back(std::move(curve));
  }

  p.domain.lo = lo.value_or(Vec::Constant(p.n, -10.0));
  p.domain.hi = hi.value_or(Vec::Constant(p.n, 10.0));
  p.domain.escape_scale = escape;
  try {
    validate(p);
  } catch (const Error& err) {
    throw ParseError(err.what(), 0, lineno);
  }
  if (f.budget.starts < 1 || f.budget.iters < 1 || f.samples < 1)
    throw ParseError("budgets must be positive", 0, lineno);
  return f;
}

ProblemFile load_problem_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open problem file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_problem_file(buf.str());
}

std::string format_problem_file(const ProblemFile& f) {
  const Problem& p = f.problem;
  std::ostringstream out;
  out << "name = " << p.name << "\n";
  out << "n = " << p.n << "\n";
  out << "objective = " << to_string(p.objective) << "\n";
  if (const auto* cf = std::get_if<ConeForm>(&p.feasible)) {
    for (std::size_t i = 0; i < cf->g.size(); ++i) {
      out << "constraint." << i << ".expr = " << to_string(cf->g[i]) << "\n";
      out << "constraint." << i << ".cone = " << to_string(cf->cone.factors[i]) << "\n";
    }
  } else {
    out << "residual = " << to_string(std::get<ResidualForm>(p.feasible).psi) << "\n";
  }
  out << "box.lo = " << format_box(p.domain.lo) << "\n";
  out << "box.hi = " << format_box(p.domain.hi) << "\n";
  out << "escape_scale = " << format_real(p.domain.escape_scale) << "\n";
  out << "budget.starts = " << f.budget.starts << "\n";
  out << "budget.iters = " << f.budget.iters << "\n";
  out << "budget.samples = " << f.samples << "\n";
  out << "seed = " << f.seed << "\n";
  if (f.phi) out << "phi = " << to_string(*f.phi) << "\n";
  for (std::size_t i = 0; i < f.kinf_paths.size(); ++i) {
    out << "kinf.path." << i << " = ";
    for (std::size_t k = 0; k < f.kinf_paths[i].size(); ++k) out << (k ? ", " : "") << to_string(f.kinf_paths[i][k]);
    out << "\n";
  }
  for (const auto& [group, params] : f.runs)
    for (const auto& [key, value] : params) out << "run." << group << "." << key << " = " << value << "\n";
  for (const Expectation& x : f.expectations) {
    out << "expect." << x.command << ".";
    if (!x.case_name.empty()) out << x.case_name << ".";
    out << x.field << " = " << x.matcher << "\n";
  }
  return out.str();
}

void save_problem_file(const ProblemFile& f, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write '" + path + "'");
  out << format_problem_file(f);
}

std::vector<std::pair<std::string, Expression>> expressions_of(const ProblemFile& f) {
  std::vector<std::pair<std::string, Expression>> out;
  out.emplace_back("objective", f.problem.objective);
  if (const auto* cf = std::get_if<ConeForm>(&f.problem.feasible)) {
    for (std::size_t i = 0; i < cf->g.size(); ++i) out.emplace_back("constraint." + std::to_string(i), cf->g[i]);
  } else {
    out.emplace_back("residual", std::get<ResidualForm>(f.problem.feasible).psi);
  }
  if (f.phi) out.emplace_back("phi", *f.phi);
  for (std::size_t i = 0; i < f.kinf_paths.size(); ++i)
    for (std::size_t k = 0; k < f.kinf_paths[i].size(); ++k)
      out.emplace_back("kinf.path." + std::to_string(i) + "." + std::to_string(k), f.kinf_paths[i][k]);
  return out;
}

bool equivalent(const ProblemFile& a, const ProblemFile& b) {
  const Problem& p = a.problem;
  const Problem& q = b.problem;
  if (p.name != q.name || p.n != q.n || p.feasible.index() != q.feasible.index()) return false;
  if (p.domain.lo != q.domain.lo || p.domain.hi != q.domain.hi || p.domain.escape_scale != q.domain.escape_scale)
    return false;
  if (const auto* cf = std::get_if<ConeForm>(&p.feasible)) {
    const auto& cg = std::get<ConeForm>(q.feasible);
    if (cf->g.size() != cg.g.size() || !(cf->cone.factors == cg.cone.factors)) return false;
  }
  if (a.budget.starts != b.budget.starts || a.budget.iters != b.budget.iters || a.samples != b.samples ||
      a.seed != b.seed || a.runs != b.runs || a.phi.has_value() != b.phi.has_value())
    return false;
  if (a.expectations.size() != b.expectations.size()) return false;
  for (std::size_t i = 0; i < a.expectations.size(); ++i) {
    const Expectation& x = a.expectations[i];
    const Expectation& y = b.expectations[i];
    if (x.command != y.command || x.case_name != y.case_name || x.field != y.field || x.matcher != y.matcher)
      return false;
  }
  const auto ea = expressions_of(a);
  const auto eb = expressions_of(b);
  if (ea.size() != eb.size()) return false;
  for (std::size_t i = 0; i < ea.size(); ++i)
    if (ea[i].first != eb[i].first || !structurally_equal(ea[i].second, eb[i].second)) return false;
  return true;
}

}  // namespace penaltylab
