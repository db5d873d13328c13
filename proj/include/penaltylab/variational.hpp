#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "penaltylab/gradient.hpp"
#include "penaltylab/problem.hpp"

namespace penaltylab {

/// Directions w are taken from the normal cone at Π_C(g(x)), with the
/// proximal normal (g − Π_C g)/dist first when g(x) ∉ C. This reading is
/// what makes ν finite off S; the literal one gives N_C(g(x)) = ∅ there.
inline constexpr const char* kNormalInterpretation = "normals at projection of g(x)";

struct NuOptions {
  CloudOptions cloud;
  int resolution = 64;
};

struct NuProbe {
  Vec x;
  double nu_hat = kInf;
  /// No unit normal exists at the projection (g(x) in the interior of C).
  bool empty_normals = false;
  double lambda = 0.5;
  Vec w;
  Vec u;
  Vec v;
};

/// min ‖λu + (1 − λ)v‖ over u in the cloud of f, unit normals w, and v in the
/// cloud of ⟨w, g⟩ (center gradients included). λ is the exact minimizer on
/// [1e-9, 1 − 1e-9] for each pair. Requires a cone-form problem.
NuProbe nu_estimate(const Problem& p, const Vec& x, const NuOptions& opt = {});

struct MfcqReport {
  Vec x;
  double min_norm = kInf;
  double threshold = 1e-3;
  bool holds = true;
  Vec w;
};

/// min ‖v‖ over unit w ∈ N_C(g(x)) and v in the cloud of ⟨w, g⟩ at a
/// feasible x. Throws UsageError when x is not in S within 1e-6.
MfcqReport mfcq_check(const Problem& p, const Vec& x, double threshold = 1e-3, const NuOptions& opt = {});

struct ClusterValue {
  double t = 0.0;        // f at the terminal iterate
  double level = 0.0;    // target level of the search (NaN for explicit paths)
  std::string source;    // "path i" or "shells"
  Vec x;
  double norm = 0.0;
  double norm_nu = 0.0;
  double f = 0.0;
  double dist = 0.0;
  std::uint64_t cloud_seed = 0;
};

struct KInfinityReport {
  double fstar = 0.0;
  std::vector<std::vector<Vec>> paths;
  std::vector<ClusterValue> cluster_values;
  bool violated = false;
  double witness_t = 0.0;
};

struct KInfOptions {
  /// Explicit curves x(s) given as n expressions in the parameter x0.
  std::vector<std::vector<Expression>> path_family;
  std::vector<double> path_params{1e1, 1e2, 1e3, 1e4};
  std::vector<double> shells{1e1, 1e2, 1e3, 1e4};
  int levels = 12;
  double margin = 1e-3;
  int extra_starts = 4;
  int iters = 150;
  NuOptions nu;
};

/// Terminal diagnostics must satisfy ‖x‖ ≥ 1e3, ‖x‖ν̂ ≤ 1e-2,
/// dist(g(x), C) ≤ 1e-3 and |f(x) − level| ≤ 1e-2 with x ∉ S.
bool meets_kinf_invariants(const ClusterValue& c);

/// Explicit paths first, then shells ‖x‖ = 10 … 1e4 at each level
/// t_j = fstar + margin − 0.1 j max(1, |fstar|), minimizing
/// ‖x‖ν + dist(g, C) + |f − t_j|. Violated when a reported t ≤ fstar + 1e-3;
/// the first such t is the witness.
KInfinityReport k_infinity_probe(const Problem& p, double fstar, const KInfOptions& opt, std::uint64_t seed);

/// Recomputes (‖x‖ν̂, dist) at a reported terminal point.
ClusterValue diagnose(const Problem& p, const Vec& x, const NuOptions& opt, std::uint64_t cloud_seed);

}  // namespace penaltylab
