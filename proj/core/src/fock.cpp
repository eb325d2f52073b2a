#include "csqpt/fock.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <unsupported/Eigen/MatrixFunctions>

#include "csqpt/errors.hpp"

namespace csqpt {

namespace {

const Complex kI(0.0, 1.0);

void require_dim(int dim) {
  if (dim < 1) throw ValidationError("dim must be >= 1");
}

}  // namespace

CMat annihilation_matrix(int dim) {
  require_dim(dim);
  CMat a = CMat::Zero(dim, dim);
  for (int n = 0; n + 1 < dim; ++n) a(n, n + 1) = std::sqrt(double(n + 1));
  return a;
}

CMat creation_matrix(int dim) { return annihilation_matrix(dim).adjoint(); }

CVec coherent_amplitudes(Amplitude alpha, int dim) {
  require_dim(dim);
  CVec c(dim);
  const double a2 = std::norm(alpha);
  // log-space magnitudes keep large |α| finite: ln|c_n| = −|α|²/2 + n ln|α| − ln√n!
  if (std::abs(alpha) == 0.0) {
    c.setZero();
    c(0) = 1.0;
    return c;
  }
  const double ln_abs = std::log(std::abs(alpha));
  const double arg = std::arg(alpha);
  for (int n = 0; n < dim; ++n) {
    const double ln_mag = -0.5 * a2 + n * ln_abs - 0.5 * std::lgamma(double(n) + 1.0);
    c(n) = std::exp(ln_mag) * std::polar(1.0, n * arg);
  }
  return c;
}

DensityMatrix coherent_state(Amplitude alpha, int dim, bool allow_truncation) {
  CVec c = coherent_amplitudes(alpha, dim);
  const double kept = c.squaredNorm();
  const double discarded = 1.0 - kept;
  if (discarded > kTruncationTol && !allow_truncation) {
    std::ostringstream os;
    os << "coherent_state(|alpha|=" << std::abs(alpha) << ", dim=" << dim
       << ") discards " << discarded << " of the population (> 1e-6); "
       << "raise dim or pass allow_truncation";
    throw NumericalContractError(os.str());
  }
  c /= std::sqrt(kept);
  return DensityMatrix::unchecked(c * c.adjoint());
}

DensityMatrix fock_state(int n, int dim) {
  require_dim(dim);
  if (n < 0 || n >= dim) {
    std::ostringstream os;
    os << "fock_state: n=" << n << " outside [0, " << dim << ")";
    throw ValidationError(os.str());
  }
  CMat m = CMat::Zero(dim, dim);
  m(n, n) = 1.0;
  return DensityMatrix::unchecked(m);
}

DensityMatrix squeezed_thermal_state(double var_min, double var_max, double theta, int dim) {
  require_dim(dim);
  if (!(var_min <= var_max)) throw ValidationError("squeezed_thermal_state: var_min > var_max");
  if (var_min * var_max < 0.25 - 1e-12) {
    std::ostringstream os;
    os << "squeezed_thermal_state: var_min*var_max = " << var_min * var_max
       << " violates the uncertainty bound 1/4";
    throw ValidationError(os.str());
  }
  // v_max = (n̄+1/2)e^{2r}, v_min = (n̄+1/2)e^{−2r}
  const double nbar = std::sqrt(var_min * var_max) - 0.5;
  const double r = 0.25 * std::log(var_max / var_min);

  const int pad = std::max(12, dim / 3);
  const int wd = dim + pad;

  CMat rho = CMat::Zero(wd, wd);
  if (nbar <= 1e-14) {
    rho(0, 0) = 1.0;
  } else {
    const double q = nbar / (1.0 + nbar);
    double w = 1.0 / (1.0 + nbar);
    for (int n = 0; n < wd; ++n, w *= q) rho(n, n) = w;
    rho /= rho.trace().real();
  }

  // S(r) = exp[r(â² − â†²)/2] squeezes x̂; rotate so var_min sits at θ+π/2.
  if (r > 0.0) {
    CMat a = annihilation_matrix(wd);
    CMat gen = 0.5 * r * (a * a - (a * a).adjoint().eval());
    CMat s = gen.exp();
    rho = s * rho * s.adjoint();
  }
  const double phi = theta + M_PI / 2.0;
  for (int n = 0; n < wd; ++n)
    for (int m = 0; m < wd; ++m) rho(n, m) *= std::polar(1.0, (n - m) * phi);

  const double tail = rho.diagonal().tail(pad).real().sum();
  if (tail > kTruncationTol) {
    std::ostringstream os;
    os << "squeezed_thermal_state: population " << tail << " beyond dim=" << dim
       << " exceeds 1e-6; raise dim";
    throw NumericalContractError(os.str());
  }
  CMat cut = rho.topLeftCorner(dim, dim);
  cut = 0.5 * (cut + cut.adjoint().eval());
  cut /= cut.trace().real();
  return DensityMatrix::unchecked(cut);
}

CMat sqrt_psd(const CMat& m, double tol) {
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (m + m.adjoint()));
  Eigen::VectorXd ev = es.eigenvalues();
  for (int i = 0; i < ev.size(); ++i) {
    if (ev(i) < -tol) {
      std::ostringstream os;
      os << "sqrt_psd: eigenvalue " << ev(i) << " below -" << tol;
      throw NumericalContractError(os.str());
    }
    ev(i) = ev(i) > 0.0 ? std::sqrt(ev(i)) : 0.0;
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma, double psd_tolerance) {
  if (rho.dim() != sigma.dim()) throw ValidationError("fidelity: dimension mismatch");
  // F is symmetric; take the square root of the better-conditioned operand so
  // a clean state paired with an indefinite reconstruction never errors.
  const bool swap = sigma.min_eigenvalue() > rho.min_eigenvalue();
  const CMat& first = swap ? sigma.matrix() : rho.matrix();
  const CMat& second = swap ? rho.matrix() : sigma.matrix();
  CMat sr = sqrt_psd(first, psd_tolerance);
  CMat inner = sr * second * sr;
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (inner + inner.adjoint()),
                                         Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    const double ev = es.eigenvalues()(i);
    if (ev > 0.0) sum += std::sqrt(ev);
  }
  const double f = sum * sum;
  return f < 1.0 ? f : 1.0;
}

CMat displacement_operator(Amplitude beta, int dim) {
  require_dim(dim);
  CMat a = annihilation_matrix(dim);
  CMat gen = beta * a.adjoint() - std::conj(beta) * a;
  return gen.exp();
}

DensityMatrix displace(const DensityMatrix& rho, Amplitude beta, bool allow_truncation) {
  const int dim = rho.dim();
  CMat d = displacement_operator(beta, dim);
  CMat out = d * rho.matrix() * d.adjoint();
  // Leakage check: population piled against the cutoff means the truncated
  // D no longer agrees with the true displacement.
  const int guard = std::max(1, dim / 16);
  const double edge = out.diagonal().tail(guard).real().sum();
  if (edge > kTruncationTol && !allow_truncation) {
    std::ostringstream os;
    os << "displace: population " << edge << " in the top " << guard
       << " Fock levels; displaced state is not representable at dim=" << dim;
    throw NumericalContractError(os.str());
  }
  return DensityMatrix::unchecked(std::move(out));
}

DensityMatrix phase_shift(const DensityMatrix& rho, double phi) {
  const int dim = rho.dim();
  CMat out = rho.matrix();
  for (int n = 0; n < dim; ++n)
    for (int m = 0; m < dim; ++m) out(n, m) *= std::polar(1.0, (n - m) * phi);
  return DensityMatrix::unchecked(std::move(out));
}

Amplitude mean_amplitude(const DensityMatrix& rho) {
  // Tr(â ρ) = Σ_n √(n+1) ρ_{n+1,n}
  Amplitude mean(0.0, 0.0);
  for (int n = 0; n + 1 < rho.dim(); ++n)
    mean += std::sqrt(double(n + 1)) * rho.entry(n + 1, n);
  return mean;
}

namespace {

// First and second moments of x̂ and p̂.
struct GaussianMoments {
  double mx, mp;      // ⟨x̂⟩, ⟨p̂⟩
  double vxx, vpp, vxp;  // centered second moments; vxp = ⟨{x̂,p̂}/2⟩ − mx·mp
};

GaussianMoments moments_of(const DensityMatrix& rho) {
  const int dim = rho.dim();
  const CMat a = annihilation_matrix(dim);
  const CMat x = (a + a.adjoint()) / std::sqrt(2.0);
  const CMat p = (a - a.adjoint()) / (kI * std::sqrt(2.0));
  const CMat& m = rho.matrix();
  GaussianMoments g;
  g.mx = (x * m).trace().real();
  g.mp = (p * m).trace().real();
  g.vxx = (x * x * m).trace().real() - g.mx * g.mx;
  g.vpp = (p * p * m).trace().real() - g.mp * g.mp;
  g.vxp = (0.5 * (x * p + p * x) * m).trace().real() - g.mx * g.mp;
  return g;
}

}  // namespace

double quadrature_mean(const DensityMatrix& rho, double theta) {
  GaussianMoments g = moments_of(rho);
  return g.mx * std::cos(theta) + g.mp * std::sin(theta);
}

double quadrature_variance(const DensityMatrix& rho, double theta) {
  GaussianMoments g = moments_of(rho);
  const double c = std::cos(theta), s = std::sin(theta);
  return g.vxx * c * c + g.vpp * s * s + 2.0 * g.vxp * c * s;
}

VarianceExtrema quadrature_variance_extrema(const DensityMatrix& rho) {
  GaussianMoments g = moments_of(rho);
  const double mean = 0.5 * (g.vxx + g.vpp);
  const double dx = 0.5 * (g.vxx - g.vpp);
  const double rad = std::hypot(dx, g.vxp);
  VarianceExtrema e;
  e.max_variance = mean + rad;
  e.min_variance = mean - rad;
  double th = 0.5 * std::atan2(g.vxp, dx);
  if (th < 0.0) th += M_PI;
  if (th >= M_PI - 1e-9) th = 0.0;  // the axis at pi is the axis at 0
  e.theta_of_max = th;
  return e;
}

DensityMatrix maximally_mixed(int dim) {
  require_dim(dim);
  return DensityMatrix::unchecked(CMat::Identity(dim, dim) / double(dim));
}

}  // namespace csqpt
