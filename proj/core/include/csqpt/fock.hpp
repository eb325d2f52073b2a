#pragma once

#include "csqpt/density_matrix.hpp"

namespace csqpt {

// Truncated ladder operators. annihilation(dim)(n, n+1) = √(n+1).
CMat annihilation_matrix(int dim);
CMat creation_matrix(int dim);

// Raw coherent-state amplitudes ⟨n|α⟩ = e^{−|α|²/2} αⁿ/√n!, n < dim, NOT
// renormalized (the truncation deficit is physics, not noise).
CVec coherent_amplitudes(Amplitude alpha, int dim);

// |α⟩⟨α| truncated at dim and renormalized. Rejects truncations discarding
// more than 1e-6 of population unless allow_truncation.
DensityMatrix coherent_state(Amplitude alpha, int dim, bool allow_truncation = false);

// |n⟩⟨n|.
DensityMatrix fock_state(int n, int dim);

// Zero-mean Gaussian state with quadrature variance var_max along θ and
// var_min along θ+π/2 (vacuum variance 1/2, uncertainty var_min·var_max ≥ 1/4).
// Built as a symplectically squeezed thermal state; truncation mass beyond
// dim must be < 1e-6.
DensityMatrix squeezed_thermal_state(double var_min, double var_max, double theta, int dim);

// Uhlmann fidelity F = [Tr √(√ρ σ √ρ)]² ∈ [0, 1]. Eigenvalues in
// [−psd_tolerance, 0) are clamped to zero; below that the input is rejected.
// Klauder-filtered and noisy-tensor outputs legitimately carry indefinite
// dust at the 1e-5..1e-2 scale, so the tolerance is a parameter.
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma,
                double psd_tolerance = 1e-3);

// D(β) = exp(β↠− β*â) on the truncated space (exactly unitary there).
CMat displacement_operator(Amplitude beta, int dim);

// D(β) ρ D†(β). Errors when the displaced state leaks past the cutoff.
DensityMatrix displace(const DensityMatrix& rho, Amplitude beta,
                       bool allow_truncation = false);

// U(φ) ρ U†(φ) with U(φ)|n⟩ = e^{inφ}|n⟩; rotates mean amplitude by e^{iφ}.
DensityMatrix phase_shift(const DensityMatrix& rho, double phi);

// Tr(â ρ).
Amplitude mean_amplitude(const DensityMatrix& rho);

// Mean and variance of x̂_θ = x̂ cos θ + p̂ sin θ; vacuum variance is 1/2.
double quadrature_mean(const DensityMatrix& rho, double theta);
double quadrature_variance(const DensityMatrix& rho, double theta);

// Min/max of quadrature variance over θ (exact, via the 2×2 covariance matrix).
struct VarianceExtrema {
  double min_variance;
  double max_variance;
  double theta_of_max;  // radians, in [0, π)
};
VarianceExtrema quadrature_variance_extrema(const DensityMatrix& rho);

// I/dim, the MLE starting point.
DensityMatrix maximally_mixed(int dim);

// √M for Hermitian PSD M; eigenvalues in [−tol, 0) clamped, below −tol errors.
CMat sqrt_psd(const CMat& m, double tol = kPsdTol);

}  // namespace csqpt
