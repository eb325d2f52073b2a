#pragma once

#include <vector>

#include "csqpt/phasespace.hpp"
#include "csqpt/superoperator.hpp"

namespace csqpt {

// One coherent-state probe: input amplitude α and the (reconstructed or
// simulated) process output ϱ(α).
struct ProbeRecord {
  Amplitude alpha;
  DensityMatrix output;
};

// Displacement-centered polynomial model of the probe responses over real
// amplitude a ≥ 0, valid on [0, max amplitude]. Phase symmetry extends it to
// complex α: ϱ(a·e^{iφ}) = U(φ) ϱ(a) U†(φ).
class InterpolatedResponse {
 public:
  // All fields are plain data so the JSON layer can reach them.
  std::vector<double> amplitudes;       // sorted distinct probe |α|
  int dim = 0;                          // Fock dimension of the probe outputs
  int degree = 3;                       // centered-element fit degree
  int mean_degree = 2;                  // ⟨â⟩ fit degree
  std::vector<Complex> mean_fit;        // mean_degree+1 coefficients, ⟨â⟩(a)
  // centered_fits(e, c): coefficient c of element e = l*dim + k
  Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic> centered_fits;
  bool phase_symmetric = true;
  double fidelity_threshold = 0.999;    // probe-reproduction requirement
  double min_probe_fidelity = 1.0;      // achieved at the probe points
  double max_element_residual = 0.0;    // worst per-element fit residual

  double max_amplitude() const { return amplitudes.empty() ? 0.0 : amplitudes.back(); }
  Amplitude mean_at(double a) const;
  CMat centered_at(double a) const;     // dim×dim fitted centered matrix
  void validate() const;
};

// Centers each probe output at the origin (displacement by −⟨â⟩), fits ⟨â⟩
// and every centered element with least-squares polynomials over amplitude,
// and verifies the fit reproduces each probe with fidelity ≥ threshold.
InterpolatedResponse center_and_fit(const std::vector<ProbeRecord>& probes, int degree,
                                    int mean_degree = 2, double fidelity_threshold = 0.999);

// Fit evaluation at an arbitrary α within the fitted radius: evaluate at
// a=|α|, re-displace by ⟨â⟩(a), phase-shift by arg α. Extrapolation errors.
DensityMatrix response_at(const InterpolatedResponse& fit, Amplitude alpha,
                          StateFixup* fixup = nullptr);

struct ReconstructionOptions {
  int dim_out = 0;          // 0: use the fit's dim
  bool enforce_phase_symmetry = true;
  // when > 0, warn (stderr) if the integration disk misses more than 1% of
  // the worst-case |P_{L,nm}| mass
  double mass_coverage_warn = 0.9;
};

// Superoperator tensor from the probe fit: for every pair (n,m) build
// P_{L,nm} on the grid and Riemann-sum it against ϱ(α) over the disk
// |α| ≤ max fitted amplitude; then project onto the phase-symmetric sectors
// l−k = n−m, recording the removed mass.
Superoperator reconstruct_superoperator(const InterpolatedResponse& fit, double L,
                                        const GridSpec& grid, int dim_in,
                                        const ReconstructionOptions& opts = {});

// Direct route: integrate P_{L,ρ} against the probe responses,
// bypassing the tensor.
DensityMatrix predict_output_direct(const DensityMatrix& rho,
                                    const InterpolatedResponse& fit, double L,
                                    const GridSpec& grid, StateFixup* fixup = nullptr);

// Batch variant sharing one response cache across all inputs.
std::vector<DensityMatrix> predict_output_direct_batch(
    const std::vector<DensityMatrix>& states, const InterpolatedResponse& fit, double L,
    const GridSpec& grid);

}  // namespace csqpt
