#include "penaltylab/random.hpp"

#include <array>
#include <cmath>

namespace penaltylab {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  // splitmix64 finalizer over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Vec gaussian_vector(Rng& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Vec v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

Vec unit_vector(Rng& rng, Eigen::Index n) {
  for (;;) {
    Vec v = gaussian_vector(rng, n);
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

Vec uniform_in_ball(Rng& rng, Eigen::Index n, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const Vec dir = unit_vector(rng, n);
  return dir * (radius * std::pow(unit(rng), 1.0 / static_cast<double>(n)));
}

Mat random_orthonormal(Rng& rng, Eigen::Index n) {
  Mat g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = gaussian_vector(rng, n);
  Eigen::HouseholderQR<Mat> qr(g);
  return qr.householderQ() * Mat::Identity(n, n);
}

namespace {

constexpr std::array<int, 16> kPrimes{2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53};

double radical_inverse(std::uint64_t k, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (k > 0) {
    r += f * static_cast<double>(k % base);
    k /= base;
    f *= inv;
  }
  return r;
}

}  // namespace

Vec halton_point(std::uint64_t k, Eigen::Index n, const Vec& shift) {
  Vec p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    // beyond 16 dimensions fall back to reusing primes with a different shift
    const int base = kPrimes[static_cast<std::size_t>(i) % kPrimes.size()];
    double v = radical_inverse(k + 1, base) + shift[i];
    p[i] = v - std::floor(v);
  }
  return p;
}

Vec halton_shift(std::uint64_t seed, Eigen::Index n) {
  Rng rng(derive_seed(seed, 0x4a17));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec s(n);
  for (Eigen::Index i = 0; i < n; ++i) s[i] = unit(rng);
  return s;
}

}  // namespace penaltylab
