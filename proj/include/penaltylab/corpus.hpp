#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "penaltylab/commands.hpp"

namespace penaltylab {

/// Matchers: `v +- tol`, `in [lo, hi]`, `<= v`, `>= v`, `< v`, `> v`, or a
/// literal compared as text. Throws ParseError on a malformed numeric matcher.
bool matches(const std::string& matcher, const std::string& actual);

struct CheckResult {
  Expectation expectation;
  std::string actual;
  bool passed = false;
};

struct CorpusEntry {
  std::string name;
  std::string path;
  std::vector<CheckResult> checks;
  bool passed = true;
};

struct CorpusOptions {
  std::string filter = "*";  // shell glob on the problem name
  std::optional<int> starts;
  std::optional<int> iters;
  std::optional<int> samples;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

struct CorpusRun {
  std::vector<CorpusEntry> entries;
  Report report;
  bool passed = true;
};

/// Loads every `*.problem` file in `dir`, keeps names matching the filter,
/// runs each declared (command, case) once and checks its expectations.
/// Entries are processed and reported in name order.
CorpusRun run_corpus(const std::string& dir, const CorpusOptions& opt);

/// Paths of the `*.problem` files in `dir`, sorted.
std::vector<std::string> corpus_files(const std::string& dir);

}  // namespace penaltylab
