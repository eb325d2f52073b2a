#pragma once

#include <vector>

#include "csqpt/phasespace.hpp"

namespace csqpt {

struct CalibrationCurve {
  std::vector<int> n_values;
  std::vector<double> parameter_values;  // L or α_max per n
  double target_fidelity = 0.99;
};

struct CalibrationOptions {
  double l_step = 0.1;
  double alpha_step = 0.25;
  int recon_dim = 0;  // 0: 2n+16
};

// Smallest L on the 0.1 ladder whose Klauder round trip of |n⟩⟨n| reaches the
// target fidelity. The worst case over the photon-bounded subspace H_N is the
// Fock state |N⟩ itself, so the scan over |n⟩ stands in for the subspace.
// min_l seeds the ladder (monotonicity in n makes warm starts safe).
double required_L(int n, double target_fidelity, const GridSpec& grid,
                  const CalibrationOptions& opts = {}, double min_l = 0.0);

// Smallest disk radius a on the 0.25 ladder such that truncating the
// reconstruction quadrature to |α| ≤ a still reaches the target fidelity.
double required_alpha_max(int n, double target_fidelity, double L, const GridSpec& grid,
                          const CalibrationOptions& opts = {});

CalibrationCurve required_L_curve(int max_n, double target_fidelity, const GridSpec& grid,
                                  const CalibrationOptions& opts = {});
CalibrationCurve required_alpha_max_curve(int max_n, double target_fidelity, double L,
                                          const GridSpec& grid,
                                          const CalibrationOptions& opts = {});

// Radius (in |α| units) of the disk holding the given fraction of ∬|W| for
// the Fock state |n⟩. The α_max curve sits well above this (the regularized P
// oscillates much further out than the Wigner function).
double wigner_mass_radius(int n, const GridSpec& grid, double fraction = 0.99);

}  // namespace csqpt
