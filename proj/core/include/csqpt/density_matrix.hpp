#pragma once

#include <Eigen/Dense>

#include "csqpt/conventions.hpp"

namespace csqpt {

using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// Diagnostics retained when a raw matrix is coerced into a physical state.
struct StateFixup {
  double pre_trace_re = 1.0;      // trace before renormalization (real part)
  double pre_trace_im = 0.0;
  double hermiticity_defect = 0.0;  // max |M - M†| element before symmetrization
  double min_eigenvalue = 0.0;      // of the Hermitized, renormalized matrix
};

// Truncated Fock-basis density matrix. Entry (n, m) is ⟨n|ρ|m⟩ with photon
// numbers n, m ∈ [0, dim). Immutable after construction.
class DensityMatrix {
 public:
  // Validates Hermiticity (1e-12), unit trace (1e-9) and positivity (−1e-9),
  // throws NumericalContractError otherwise.
  static DensityMatrix checked(CMat m);

  // Hermitizes ((M+M†)/2), renormalizes to unit trace and records the
  // diagnostics; positivity is reported, not enforced. The route for MLE and
  // superoperator outputs.
  static DensityMatrix from_reconstruction(CMat m, StateFixup* fixup = nullptr);

  // No checks at all. Internal plumbing only.
  static DensityMatrix unchecked(CMat m);

  int dim() const { return static_cast<int>(mat_.rows()); }
  const CMat& matrix() const { return mat_; }
  Complex entry(int n, int m) const { return mat_(n, m); }

  double trace_real() const { return mat_.trace().real(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;

 private:
  explicit DensityMatrix(CMat m) : mat_(std::move(m)) {}
  CMat mat_;
};

}  // namespace csqpt
