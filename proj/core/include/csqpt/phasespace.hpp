#pragma once

#include "csqpt/density_matrix.hpp"

namespace csqpt {

// Square sampling grid: both axes run over [−half_extent, half_extent) with
// points_per_axis nodes, node i at (i − N/2)·step. The conjugate (k-space)
// grid induced by the DFT has half-extent π·N/(2·half_extent) and step π/half_extent.
struct GridSpec {
  double half_extent = 12.0;
  int points_per_axis = 512;

  GridSpec() = default;
  GridSpec(double he, int n);

  double step() const { return 2.0 * half_extent / points_per_axis; }
  double conjugate_half_extent() const {
    return M_PI * points_per_axis / (2.0 * half_extent);
  }
  double conjugate_step() const { return M_PI / half_extent; }
  double axis_value(int i) const { return (i - points_per_axis / 2) * step(); }
  double conjugate_axis_value(int i) const {
    return (i - points_per_axis / 2) * conjugate_step();
  }
  bool operator==(const GridSpec& o) const {
    return half_extent == o.half_extent && points_per_axis == o.points_per_axis;
  }
};

enum class FieldDomain { Position, Frequency };  // (x,p) vs (k_x,k_p)

// Complex field sampled on a GridSpec; values(i, j) sits at axis node i on the
// first coordinate (x or k_x) and j on the second (p or k_p).
struct PhaseSpaceField {
  GridSpec grid;
  FieldDomain domain = FieldDomain::Position;
  CMat values;

  PhaseSpaceField() = default;
  PhaseSpaceField(const GridSpec& g, FieldDomain d);

  // Riemann sum ∬ f over the grid.
  Complex integral() const;
  double max_abs_imag() const { return values.imag().cwiseAbs().maxCoeff(); }
  void require_finite(const char* what) const;
};

// Continuum-normalized DFT pair on centered grids:
//   forward:  F(k) = step² Σ f(r) e^{−i k·r}, inverse exactly undoes it.
PhaseSpaceField fourier_forward(const PhaseSpaceField& f);
PhaseSpaceField fourier_inverse(const PhaseSpaceField& f);

// W(x,p) of ρ from the analytic Fock-basis Laguerre kernels, normalized to
// ∬W dx dp = 1. Warns (stderr) when |W| at the grid boundary exceeds 1e-10.
PhaseSpaceField wigner(const DensityMatrix& rho, const GridSpec& grid);

// Wigner kernel of |n⟩⟨m| on the grid (the non-Hermitian "Wigner function").
PhaseSpaceField wigner_fock_pair(int n, int m, const GridSpec& grid);

// P̃_ρ(k) = W̃_ρ(k)·exp((k_x²+k_p²)/4), evaluated in closed form (the Gaussian
// factors cancel analytically, so no deconvolution noise). Values outside the
// inscribed disk |k| ≤ conjugate_half_extent are zeroed: the square grid's
// corners are never trustworthy deconvolution territory.
PhaseSpaceField p_tilde_from_state(const DensityMatrix& rho, const GridSpec& grid);

// Klauder low-pass regularizer G_L: exactly 1 on the square |k_x|,|k_p| ≤ L,
// C∞ roll-off outside via f(y) = y⁴exp(−1/y²).
double evaluate_gl(double k_x, double k_y, double L);

// P_{L,ρ}: inverse transform of P̃_ρ·G_L. Real within 1e-9 for Hermitian ρ.
// Requires conjugate_half_extent(grid) > L + 4.
PhaseSpaceField regularized_p(const DensityMatrix& rho, double L, const GridSpec& grid);

// P_{L,nm} of the operator |n⟩⟨m| through the identical pipeline;
// P_{L,mn} = conj(P_{L,nm}) pointwise.
PhaseSpaceField regularized_p_fock_pair(int n, int m, double L, const GridSpec& grid);

// Quadrature of ρ̂ = ∬ P(x,p)|α⟩⟨α| dx dp over the grid, Hermitized and
// renormalized; errors if the pre-normalization trace is off 1 by > 0.05.
DensityMatrix state_from_p(const PhaseSpaceField& p_field, int dim,
                           StateFixup* fixup = nullptr);

// Same quadrature restricted to |α| ≤ alpha_max (the finite-probe-amplitude
// truncation the calibration module studies). No trace-window check here:
// heavily truncated discs are legitimate inputs.
DensityMatrix state_from_p_disk(const PhaseSpaceField& p_field, int dim,
                                double alpha_max, StateFixup* fixup = nullptr);

}  // namespace csqpt
