#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "penaltylab/problem_file.hpp"
#include "penaltylab/report.hpp"

namespace penaltylab {

/// Budgets and switches shared by every command.
struct RunSettings {
  Budget budget;
  int samples = 100000;
  std::uint64_t seed = 1;
  double tol = 1e-6;
  /// Record wall_ms; off by default so reports stay byte-identical.
  bool timing = false;
};

/// The file's own budgets and seed.
RunSettings settings_from(const ProblemFile& f);

/// Commands understood by run_command.
const std::vector<std::string>& command_names();

/// Runs one command on a problem file. Recognized params per command:
///   certify   penalty (several separated by ';', default plain(1))
///   cstar     penalty (form used for the effective residual, default plain(1))
///   envelope  validation_samples
///   calmness  kmax, u_max
///   sequences epsilon, bound
///   distcond  delta, bound
///   nu        at
///   mfcq      at, threshold
///   kinf      fstar
/// Unknown params raise UsageError.
Report run_command(const std::string& command, const ProblemFile& f, const RunParams& params, const RunSettings& s);

/// Two-column numeric series for plotting:
///   c-sweep          certify rows: c, fstar − penalized_inf
///   loglog-envelope  envelope rows: log10 t, log10 μ̂ (the branch given, or both)
///   calmness         calmness rows: ‖u‖, V(u)
/// Throws UsageError when the report lacks the needed columns.
std::string emit_plotdata(const Report& r, const std::string& kind);

}  // namespace penaltylab
