#include "csqpt/density_matrix.hpp"

#include <Eigen/Eigenvalues>
#include <sstream>

#include "csqpt/errors.hpp"

namespace csqpt {

double DensityMatrix::hermiticity_defect() const {
  return (mat_ - mat_.adjoint()).cwiseAbs().maxCoeff();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (mat_ + mat_.adjoint()),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

DensityMatrix DensityMatrix::checked(CMat m) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw ValidationError("density matrix must be square with dim >= 1");
  }
  DensityMatrix rho(std::move(m));
  const double herm = rho.hermiticity_defect();
  if (herm > kHermitianTol) {
    std::ostringstream os;
    os << "density matrix not Hermitian: max |M - M^dag| = " << herm;
    throw NumericalContractError(os.str());
  }
  const Complex tr = rho.mat_.trace();
  if (std::abs(tr - Complex(1.0, 0.0)) > kTraceTol) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << " deviates from 1 beyond " << kTraceTol;
    throw NumericalContractError(os.str());
  }
  const double min_eig = rho.min_eigenvalue();
  if (min_eig < -kPsdTol) {
    std::ostringstream os;
    os << "density matrix not positive semidefinite: min eigenvalue " << min_eig;
    throw NumericalContractError(os.str());
  }
  return rho;
}

DensityMatrix DensityMatrix::from_reconstruction(CMat m, StateFixup* fixup) {
  if (m.rows() < 1 || m.rows() != m.cols()) {
    throw ValidationError("density matrix must be square with dim >= 1");
  }
  StateFixup diag;
  diag.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
  CMat h = 0.5 * (m + m.adjoint().eval());
  const Complex tr = m.trace();
  diag.pre_trace_re = tr.real();
  diag.pre_trace_im = tr.imag();
  const double htr = h.trace().real();
  if (!(std::abs(htr) > 1e-300)) {
    throw NumericalContractError("reconstructed matrix has vanishing trace");
  }
  h /= htr;
  DensityMatrix rho(std::move(h));
  diag.min_eigenvalue = rho.min_eigenvalue();
  if (fixup) *fixup = diag;
  return rho;
}

DensityMatrix DensityMatrix::unchecked(CMat m) { return DensityMatrix(std::move(m)); }

}  // namespace csqpt
