#pragma once

#include <cstdint>
#include <random>

#include "penaltylab/types.hpp"

namespace penaltylab {

using Rng = std::mt19937_64;

/// Mixes a base seed with a stream index so that independent work items
/// (starts, shells, grid points) get independent, reproducible generators.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

Vec gaussian_vector(Rng& rng, Eigen::Index n);
Vec unit_vector(Rng& rng, Eigen::Index n);
Vec uniform_in_ball(Rng& rng, Eigen::Index n, double radius);

/// Orthonormal basis drawn from the Haar measure (QR of a Gaussian matrix).
Mat random_orthonormal(Rng& rng, Eigen::Index n);

/// Point k of a randomly shifted Halton sequence in [0,1)^n. Prefixes of the
/// sequence are nested, so growing a start budget only adds points.
Vec halton_point(std::uint64_t k, Eigen::Index n, const Vec& shift);
Vec halton_shift(std::uint64_t seed, Eigen::Index n);

}  // namespace penaltylab
