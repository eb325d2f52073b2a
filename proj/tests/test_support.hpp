#pragma once

#include <cmath>
#include <random>

#include "csqpt/density_matrix.hpp"
#include "csqpt/fock.hpp"

namespace csqpt::testing {

// Smallest Fock dimension holding coherent amplitudes up to `a` with less
// than 1e-7 truncated population.
inline int coherent_dim_for(double a) {
  int dim = 8;
  while (1.0 - coherent_amplitudes(Amplitude(a, 0.0), dim).squaredNorm() > 1e-7)
    dim += 2;
  return dim;
}

// Ginibre-style random mixed state, deterministic per seed.
inline DensityMatrix random_state(int dim, std::uint64_t seed, int rank = 0) {
  std::mt19937_64 rng(seed);
  auto gauss = [&rng] {
    // Box-Muller on explicit 53-bit uniforms keeps this platform-stable
    double u1 = (rng() >> 11) * 0x1.0p-53;
    double u2 = (rng() >> 11) * 0x1.0p-53;
    u1 = std::max(u1, 1e-300);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  };
  const int r = rank > 0 ? rank : dim;
  CMat g(dim, r);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < r; ++j) g(i, j) = Complex(gauss(), gauss());
  CMat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityMatrix::unchecked(std::move(rho));
}

// Random state supported on the lowest `support` levels of a dim-sized space
// (displacements and channels need headroom above the populated levels).
inline DensityMatrix random_low_state(int dim, int support, std::uint64_t seed) {
  DensityMatrix small = random_state(support, seed);
  CMat m = CMat::Zero(dim, dim);
  m.topLeftCorner(support, support) = small.matrix();
  return DensityMatrix::unchecked(std::move(m));
}

inline double binomial_diag(int m, int k, double eta) {
  if (k > m || k < 0) return 0.0;
  double ln = std::lgamma(m + 1.0) - std::lgamma(k + 1.0) - std::lgamma(m - k + 1.0);
  if (k > 0) ln += k * std::log(eta);
  if (m - k > 0) ln += (m - k) * std::log1p(-eta);
  return std::exp(ln);
}

}  // namespace csqpt::testing
