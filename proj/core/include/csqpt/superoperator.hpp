#pragma once

#include <vector>

#include "csqpt/density_matrix.hpp"

namespace csqpt {

// Rank-4 process tensor E_{lk}^{nm}: output element (l,k) from input element
// (n,m). l,k < dim_out, n,m < dim_in. Storage is row-major over (l,k,n,m),
// matching the JSON wire format.
struct Superoperator {
  int dim_in = 0;
  int dim_out = 0;
  bool phase_symmetric = false;
  // Frobenius-norm ratio removed by phase-symmetry enforcement (0 when the
  // tensor was built symmetric).
  double removed_mass_ratio = 0.0;
  std::vector<Complex> tensor;

  Superoperator() = default;
  Superoperator(int din, int dout)
      : dim_in(din), dim_out(dout),
        tensor(static_cast<size_t>(din) * din * dout * dout, Complex(0, 0)) {}

  size_t index(int l, int k, int n, int m) const {
    return ((static_cast<size_t>(l) * dim_out + k) * dim_in + n) * dim_in + m;
  }
  Complex& at(int l, int k, int n, int m) { return tensor[index(l, k, n, m)]; }
  const Complex& at(int l, int k, int n, int m) const { return tensor[index(l, k, n, m)]; }
};

// Tensor contraction out_{lk} = Σ_{nm} E_{lk}^{nm} ρ_{nm}, Hermitized and
// renormalized with diagnostics.
DensityMatrix apply_superoperator(const Superoperator& sop, const DensityMatrix& rho,
                                  StateFixup* fixup = nullptr);

// Raw contraction without the physical-state fixup (tests use it to observe
// the pre-Hermitization output).
CMat apply_superoperator_raw(const Superoperator& sop, const CMat& rho);

// max over (n,m) of |Σ_l E_{ll}^{nm} − δ_{nm}|.
double trace_preservation_defect(const Superoperator& sop);

// Minimum eigenvalue of the Choi matrix C_{(n,l),(m,k)} = E_{lk}^{nm}
// (row n·dim_out+l, column m·dim_out+k). ≥ 0 iff completely positive.
double choi_min_eigenvalue(const Superoperator& sop);

}  // namespace csqpt
