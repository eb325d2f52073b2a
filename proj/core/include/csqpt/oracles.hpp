#pragma once

#include <vector>

#include "csqpt/superoperator.hpp"

namespace csqpt {

// Loss (power transmission η) followed by a phase shift φ; the two commute.
struct ChannelSpec {
  double transmission = 1.0;  // η ∈ [0, 1]
  double phase = 0.0;         // radians

  // The channel studied in the acceptance runs: 34% loss, 36° phase shift.
  static ChannelSpec paper_eom() { return {0.66, 36.0 * M_PI / 180.0}; }
};

// Kraus operators of the Bernoulli loss channel at dimension dim:
// A_k = Σ_n √C(n,k) √(η^{n−k}(1−η)^k) |n−k⟩⟨n| (k photons lost).
std::vector<CMat> loss_kraus_operators(double eta, int dim);

// Σ_k A_k M A_k† on an arbitrary (not necessarily Hermitian) operator.
CMat loss_map(const CMat& m, double eta);

// Adjoint map Σ_k A_k† M A_k; turns ideal POVM elements into efficiency-η ones.
CMat loss_map_adjoint(const CMat& m, double eta);

DensityMatrix loss_channel(const DensityMatrix& rho, double eta);

// phase_shift(loss_channel(rho, η), φ); commutation asserted.
DensityMatrix eom_process(const DensityMatrix& rho, const ChannelSpec& spec);

// Exact process tensor of eom_process, assembled by pushing every |n⟩⟨m|
// through the channel. Phase-symmetric by construction.
Superoperator theoretical_superoperator(const ChannelSpec& spec, int dim);

}  // namespace csqpt
