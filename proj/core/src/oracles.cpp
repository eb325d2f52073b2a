#include "csqpt/oracles.hpp"

#include <cmath>
#include <sstream>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"

namespace csqpt {

namespace {

void require_eta(double eta) {
  if (!(eta >= 0.0 && eta <= 1.0)) {
    std::ostringstream os;
    os << "loss channel: eta=" << eta << " outside [0, 1]";
    throw ValidationError(os.str());
  }
}

// √(C(n,k) η^{n−k} (1−η)^k) in log space; exact 0 at the η ∈ {0,1} edges.
double kraus_weight(int n, int k, double eta) {
  if (k > 0 && eta == 1.0) return 0.0;
  if (k < n && eta == 0.0) return 0.0;
  double ln = 0.5 * (std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0));
  if (n - k > 0) ln += 0.5 * (n - k) * std::log(eta);
  if (k > 0) ln += 0.5 * k * std::log(1.0 - eta);
  return std::exp(ln);
}

}  // namespace

std::vector<CMat> loss_kraus_operators(double eta, int dim) {
  require_eta(eta);
  std::vector<CMat> kraus;
  kraus.reserve(dim);
  for (int k = 0; k < dim; ++k) {
    CMat a = CMat::Zero(dim, dim);
    for (int n = k; n < dim; ++n) a(n - k, n) = kraus_weight(n, k, eta);
    kraus.push_back(std::move(a));
  }
  return kraus;
}

CMat loss_map(const CMat& m, double eta) {
  require_eta(eta);
  const int dim = static_cast<int>(m.rows());
  // (Λ M)_{nm} = Σ_k w(n+k,k) w(m+k,k) M_{n+k,m+k}; band structure makes the
  // full Kraus sum unnecessary.
  CMat out = CMat::Zero(dim, dim);
  for (int k = 0; k < dim; ++k) {
    for (int n = 0; n + k < dim; ++n) {
      const double wn = kraus_weight(n + k, k, eta);
      if (wn == 0.0) continue;
      for (int mm = 0; mm + k < dim; ++mm) {
        const double wm = kraus_weight(mm + k, k, eta);
        if (wm == 0.0) continue;
        out(n, mm) += wn * wm * m(n + k, mm + k);
      }
    }
  }
  return out;
}

CMat loss_map_adjoint(const CMat& m, double eta) {
  require_eta(eta);
  const int dim = static_cast<int>(m.rows());
  // (Λ† M)_{nm} = Σ_k w(n,k) w(m,k) M_{n−k,m−k}
  CMat out = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int mm = 0; mm < dim; ++mm) {
      Complex acc(0.0, 0.0);
      const int kmax = std::min(n, mm);
      for (int k = 0; k <= kmax; ++k) {
        const double w = kraus_weight(n, k, eta) * kraus_weight(mm, k, eta);
        if (w != 0.0) acc += w * m(n - k, mm - k);
      }
      out(n, mm) = acc;
    }
  }
  return out;
}

DensityMatrix loss_channel(const DensityMatrix& rho, double eta) {
  CMat out = loss_map(rho.matrix(), eta);
  const double tr = out.trace().real();
  if (std::abs(tr - 1.0) > 1e-12) {
    std::ostringstream os;
    os << "loss_channel: trace drifted to " << tr;
    throw NumericalContractError(os.str());
  }
  return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix eom_process(const DensityMatrix& rho, const ChannelSpec& spec) {
  require_eta(spec.transmission);
  DensityMatrix a = phase_shift(loss_channel(rho, spec.transmission), spec.phase);
  DensityMatrix b = loss_channel(phase_shift(rho, spec.phase), spec.transmission);
  const double comm = (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
  if (comm > 1e-12) {
    std::ostringstream os;
    os << "eom_process: loss and phase failed to commute (defect " << comm << ")";
    throw NumericalContractError(os.str());
  }
  return a;
}

Superoperator theoretical_superoperator(const ChannelSpec& spec, int dim) {
  require_eta(spec.transmission);
  if (dim < 1) throw ValidationError("theoretical_superoperator: dim must be >= 1");
  Superoperator sop(dim, dim);
  sop.phase_symmetric = true;
  CMat basis = CMat::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    for (int m = 0; m < dim; ++m) {
      basis(n, m) = 1.0;
      CMat pushed = loss_map(basis, spec.transmission);
      for (int l = 0; l < dim; ++l)
        for (int k = 0; k < dim; ++k)
          if (pushed(l, k) != Complex(0.0, 0.0))
            sop.at(l, k, n, m) = pushed(l, k) * std::polar(1.0, (l - k) * spec.phase);
      basis(n, m) = 0.0;
    }
  }
  return sop;
}

}  // namespace csqpt
