#pragma once

#include <cstdint>
#include <vector>

#include "penaltylab/penalty.hpp"
#include "penaltylab/problem.hpp"
#include "penaltylab/sequences.hpp"

namespace penaltylab {

enum class DistCondStatus { Evaluated, Inconclusive };

/// Searches for paths violating
///   (C1)  ψ(x_k) → 0  ⟹ dist(x_k, S) → 0, and
///   (C2') dist(x_k, S) → ∞ ⟹ ψ(x_k) → ∞.
/// Shell iterates carry the distance estimate in the `phi` slot.
struct DistCondReport {
  DistCondStatus status = DistCondStatus::Inconclusive;
  bool c1_holds = true;
  bool c2_holds = true;
  std::vector<ShellPoint> c1_path;
  std::vector<ShellPoint> c2_path;
  int s_sample_size = 0;
  double delta = 1.0;
  double psi_bound = 1.0;
};

struct DistCondOptions {
  int s_starts = 64;
  double delta = 1.0;
  double psi_bound = 1.0;
  double weight = 1e3;
  int extra_starts = 6;
  int iters = 200;
};

/// dist(x, S) is estimated as the smaller of the distance to a sample of S
/// (restorations from Halton starts in the escape cube) and the distance to
/// the restoration of x itself.
DistCondReport probe_distance_conditions(const Problem& p, const ResidualSpec& r, const DistCondOptions& opt,
                                         std::uint64_t seed);

}  // namespace penaltylab
