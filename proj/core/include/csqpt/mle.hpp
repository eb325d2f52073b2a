#pragma once

#include <cstdint>
#include <vector>

#include "csqpt/density_matrix.hpp"

namespace csqpt {

struct QuadratureSample {
  double phase = 0.0;  // local-oscillator phase θ, folded into [0, 2π)
  double value = 0.0;  // x_θ, vacuum-normalized (vacuum variance 1/2)
};

struct HomodyneDataset {
  std::vector<QuadratureSample> samples;
  double efficiency = 1.0;  // detection efficiency η assumed at reconstruction

  void validate() const;
};

// pr(x|θ) = ⟨x_θ|ρ|x_θ⟩ with ⟨n|x_θ⟩ = e^{inθ}ψ_n(x), ψ_0 = π^{−1/4}e^{−x²/2}.
double quadrature_pdf(const DensityMatrix& rho, double theta, double x);

// Hermite functions ψ_0..ψ_{dim−1} at x (vacuum-variance-1/2 convention).
void hermite_functions(int dim, double x, double* psi);

// Inverse-CDF sampling on a fine x grid; deterministic given seed, phases
// recorded exactly.
HomodyneDataset sample_quadratures(const DensityMatrix& rho,
                                   const std::vector<double>& phases,
                                   int count_per_phase, std::uint64_t seed);

struct MleOptions {
  int max_iters = 2000;
  double tol = 1e-9;  // log-likelihood gain per sample
};

struct MleResult {
  DensityMatrix rho;
  bool converged = false;
  int iterations = 0;
  double final_log_likelihood = 0.0;  // binned, per dataset
  double completeness_defect = 0.0;   // max |Σ_b Π_b − I| over the POVM
};

// Iterative RρR expectation-maximization from the maximally mixed state.
// Samples are binned into 256 equal bins per phase over ±6√(max variance);
// the POVM is bin-integrated, and pre-composed with the Bernoulli loss map
// when dataset.efficiency < 1. The binned log-likelihood is asserted
// nondecreasing (any drop beyond 1e-12/sample is a hard error).
MleResult mle_reconstruct(const HomodyneDataset& data, int dim,
                          const MleOptions& opts = MleOptions());

// Σ_j log pr(x_j|θ_j) under ρ with the dataset's efficiency model
// (probabilities clamped at 1e-300). Unbinned, order-invariant.
double log_likelihood(const HomodyneDataset& data, const DensityMatrix& rho);

// Bin-integrated POVM completeness defect at dimension dim (diagnostic).
double povm_completeness_defect(int dim, double efficiency);

}  // namespace csqpt
