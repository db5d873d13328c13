#pragma once

#include <cstdint>
#include <vector>

#include "penaltylab/problem.hpp"
#include "penaltylab/types.hpp"

namespace penaltylab {

/// One shell iterate of a sequence search.
struct ShellPoint {
  double radius = 0.0;
  Vec x;
  double phi = 0.0;
  double psi = 0.0;
};

/// First type: ‖x‖ → ∞, ψ → 0, φ ≥ ε. Second type: ‖x‖ → ∞, ψ ≤ B, φ → ∞.
/// The path fields hold the shell iterates; `*_found` says whether they
/// satisfy the defining trends on the searched shells.
struct SequenceVerdict {
  std::vector<ShellPoint> first_path;
  bool first_found = false;
  std::vector<ShellPoint> second_path;
  bool second_found = false;
  double epsilon_used = 0.0;
  double bound_used = 0.0;
};

struct SequenceOptions {
  /// 0 selects 0.1 × (max − min) of φ over box samples.
  double epsilon = 0.0;
  double psi_bound = 1.0;
  double weight = 1e3;
  int extra_starts = 6;
  int iters = 300;
};

inline constexpr double kSecondTypeThreshold = 1e6;

/// Searches shells ‖x − center‖ = 10, 10², … up to escape_scale.
SequenceVerdict probe_sequence_types(const ScalarFn& phi, const ScalarFn& psi, const SearchDomain& d,
                                     const SequenceOptions& opt, std::uint64_t seed);

/// Radii 10^k (k ≥ 1) not exceeding the escape scale.
std::vector<double> shell_radii(double escape_scale);

}  // namespace penaltylab
