// Phase-space pipeline. Wigner fields come from the analytic Fock-basis
// Laguerre kernels; P̃ comes from the closed-form characteristic function
// ⟨m|D(λ)|n⟩ with λ = (k_p − i k_x)/√2, in which the e^{±k²/4} Gaussians of
// the deconvolution cancel exactly. That keeps P̃ polynomial-exact at
// every grid node (an FFT route would amplify its own roundoff by e^{k²/4},
// which ruins large-L scans).

#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <vector>

#include "csqpt/errors.hpp"
#include "csqpt/phasespace.hpp"
#include "csqpt/threading.hpp"

namespace csqpt {

namespace {

const Complex kI(0.0, 1.0);

double sqrt_factorial_ratio(int small, int large) {
  // √(small!/large!), small ≤ large
  return std::exp(0.5 * (std::lgamma(small + 1.0) - std::lgamma(large + 1.0)));
}

// L_j^{(d)}(u) for j = 0..jmax, written into lag[0..jmax].
void laguerre_column(int jmax, int d, double u, double* lag) {
  lag[0] = 1.0;
  if (jmax == 0) return;
  lag[1] = 1.0 + d - u;
  for (int j = 1; j < jmax; ++j)
    lag[j + 1] = ((2.0 * j + d + 1.0 - u) * lag[j] - (j + d) * lag[j - 1]) / (j + 1.0);
}

// Evaluates Σ_{nm} ρ_{nm} P̃_{nm} over the whole grid, times an arbitrary
// per-node filter (the inscribed-disk mask for the bare P̃, G_L for the
// regularized one). Nodes where the filter underflows are skipped outright.
// Closed form of the pair kernels, with λ = (k_p − i k_x)/√2:
//   m ≥ n:  P̃_{nm}(k) = √(n!/m!)·λ^{m−n}·L_n^{(m−n)}(k²/2)
//   n > m:  P̃_{nm}(k) = √(m!/n!)·(−λ*)^{n−m}·L_m^{(n−m)}(k²/2)
PhaseSpaceField p_tilde_filtered(const CMat& rho, const GridSpec& grid,
                                 const std::function<double(double, double)>& filter) {
  const int dim = static_cast<int>(rho.rows());
  const int npts = grid.points_per_axis;
  PhaseSpaceField out(grid, FieldDomain::Frequency);

  // c_{n,d} = √(n!/(n+d)!)
  Eigen::MatrixXd coef(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int d = 0; n + d < dim; ++d) coef(n, d) = sqrt_factorial_ratio(n, n + d);

  parallel_for(npts, [&](int i) {
    const double kx = grid.conjugate_axis_value(i);
    std::vector<double> lag(dim);
    std::vector<Complex> pow_lam(dim), pow_neg(dim);
    for (int j = 0; j < npts; ++j) {
      const double kp = grid.conjugate_axis_value(j);
      const double g = filter(kx, kp);
      if (g == 0.0) {
        out.values(i, j) = Complex(0.0, 0.0);
        continue;
      }
      const Complex lam = Complex(kp, -kx) / std::sqrt(2.0);
      const double u = 0.5 * (kx * kx + kp * kp);
      pow_lam[0] = Complex(1.0, 0.0);
      pow_neg[0] = Complex(1.0, 0.0);
      for (int d = 1; d < dim; ++d) {
        pow_lam[d] = pow_lam[d - 1] * lam;
        pow_neg[d] = pow_neg[d - 1] * (-std::conj(lam));
      }
      Complex acc(0.0, 0.0);
      for (int d = 0; d < dim; ++d) {
        laguerre_column(dim - 1 - d, d, u, lag.data());
        if (d == 0) {
          for (int n = 0; n < dim; ++n) acc += rho(n, n) * lag[n];
        } else {
          Complex s(0.0, 0.0);
          for (int n = 0; n + d < dim; ++n) {
            const double cl = coef(n, d) * lag[n];
            s += cl * (rho(n, n + d) * pow_lam[d] + rho(n + d, n) * pow_neg[d]);
          }
          acc += s;
        }
      }
      out.values(i, j) = acc * g;
    }
  });
  return out;
}

void require_grid_supports(double L, const GridSpec& grid, const char* op) {
  const double kmax = grid.conjugate_half_extent();
  if (!(kmax > L + 4.0)) {
    std::ostringstream os;
    os << op << ": conjugate half-extent " << kmax << " must exceed L+4 = "
       << L + 4.0 << "; need points_per_axis > "
       << 2.0 * grid.half_extent * (L + 4.0) / M_PI << " at half_extent "
       << grid.half_extent;
    throw ValidationError(os.str());
  }
  if (!(L > 0.0)) throw ValidationError("regularization cutoff L must be > 0");
}

}  // namespace

double evaluate_gl(double k_x, double k_y, double L) {
  if (!(L > 0.0)) throw ValidationError("evaluate_gl: L must be > 0");
  auto f = [](double y) {
    if (y <= 0.0) return 0.0;
    const double inv = 1.0 / (y * y);
    return y * y * y * y * std::exp(-inv);
  };
  const double s = f(k_x - L) + f(-k_x - L) + f(k_y - L) + f(-k_y - L);
  return s == 0.0 ? 1.0 : std::exp(-s);
}

PhaseSpaceField wigner_fock_pair(int n, int m, const GridSpec& grid) {
  if (n < 0 || m < 0) throw ValidationError("wigner_fock_pair: negative index");
  const int npts = grid.points_per_axis;
  PhaseSpaceField out(grid, FieldDomain::Position);
  const int lo = std::min(n, m), d = std::abs(n - m);
  const double norm = sqrt_factorial_ratio(lo, std::max(n, m)) *
                      ((lo % 2) ? -1.0 : 1.0) / M_PI;
  parallel_for(npts, [&](int i) {
    const double x = grid.axis_value(i);
    std::vector<double> lag(lo + 1);
    for (int j = 0; j < npts; ++j) {
      const double p = grid.axis_value(j);
      const double r2 = x * x + p * p;
      laguerre_column(lo, d, 2.0 * r2, lag.data());
      // w = √2(x − ip) carries (√2 r)^d e^{−i d φ}; n<m takes the conjugate
      const Complex w = (n >= m) ? std::sqrt(2.0) * Complex(x, -p)
                                 : std::sqrt(2.0) * Complex(x, p);
      out.values(i, j) = norm * std::pow(w, d) * std::exp(-r2) * lag[lo];
    }
  });
  out.require_finite("wigner_fock_pair");
  return out;
}

PhaseSpaceField wigner(const DensityMatrix& rho, const GridSpec& grid) {
  const int dim = rho.dim();
  const int npts = grid.points_per_axis;
  PhaseSpaceField out(grid, FieldDomain::Position);

  Eigen::MatrixXd coef(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int d = 0; n + d < dim; ++d)
      coef(n, d) = sqrt_factorial_ratio(n, n + d) * ((n % 2) ? -1.0 : 1.0) / M_PI;

  const CMat& r = rho.matrix();
  parallel_for(npts, [&](int i) {
    const double x = grid.axis_value(i);
    std::vector<double> lag(dim);
    std::vector<Complex> pow_w(dim);
    for (int j = 0; j < npts; ++j) {
      const double p = grid.axis_value(j);
      const double r2 = x * x + p * p;
      const double gauss = std::exp(-r2);
      const Complex w = std::sqrt(2.0) * Complex(x, -p);
      pow_w[0] = Complex(1.0, 0.0);
      for (int d = 1; d < dim; ++d) pow_w[d] = pow_w[d - 1] * w;
      Complex acc(0.0, 0.0);
      for (int d = 0; d < dim; ++d) {
        laguerre_column(dim - 1 - d, d, 2.0 * r2, lag.data());
        if (d == 0) {
          for (int n = 0; n < dim; ++n) acc += r(n, n) * (coef(n, 0) * lag[n]);
        } else {
          Complex s(0.0, 0.0);
          // (n,m)=(lo+d,lo) uses w^d, its mirror the conjugate power
          for (int lo = 0; lo + d < dim; ++lo) {
            const double cl = coef(lo, d) * lag[lo];
            s += cl * (r(lo + d, lo) * pow_w[d] + r(lo, lo + d) * std::conj(pow_w[d]));
          }
          acc += s;
        }
      }
      out.values(i, j) = gauss * acc;
    }
  });
  out.require_finite("wigner");

  double edge = 0.0;
  const int last = npts - 1;
  for (int t = 0; t < npts; ++t) {
    edge = std::max({edge, std::abs(out.values(0, t)), std::abs(out.values(last, t)),
                     std::abs(out.values(t, 0)), std::abs(out.values(t, last))});
  }
  if (edge > 1e-10) {
    std::cerr << "warning: wigner: |W| reaches " << edge
              << " at the grid boundary; enlarge half_extent\n";
  }
  return out;
}

PhaseSpaceField p_tilde_from_state(const DensityMatrix& rho, const GridSpec& grid) {
  const double kmax = grid.conjugate_half_extent();
  auto disk_mask = [kmax](double kx, double kp) {
    return (kx * kx + kp * kp <= kmax * kmax) ? 1.0 : 0.0;
  };
  PhaseSpaceField out = p_tilde_filtered(rho.matrix(), grid, disk_mask);
  out.require_finite("p_tilde_from_state");
  return out;
}

PhaseSpaceField regularized_p(const DensityMatrix& rho, double L, const GridSpec& grid) {
  require_grid_supports(L, grid, "regularized_p");
  auto gl = [L](double kx, double kp) { return evaluate_gl(kx, kp, L); };
  PhaseSpaceField tilde = p_tilde_filtered(rho.matrix(), grid, gl);
  PhaseSpaceField out = fourier_inverse(tilde);
  out.require_finite("regularized_p");
  return out;
}

PhaseSpaceField regularized_p_fock_pair(int n, int m, double L, const GridSpec& grid) {
  require_grid_supports(L, grid, "regularized_p_fock_pair");
  if (n < 0 || m < 0) throw ValidationError("regularized_p_fock_pair: negative index");
  const int dim = std::max(n, m) + 1;
  CMat op = CMat::Zero(dim, dim);
  op(n, m) = 1.0;
  auto gl = [L](double kx, double kp) { return evaluate_gl(kx, kp, L); };
  PhaseSpaceField tilde = p_tilde_filtered(op, grid, gl);
  PhaseSpaceField out = fourier_inverse(tilde);
  out.require_finite("regularized_p_fock_pair");
  return out;
}

namespace {

DensityMatrix quadrature_of_p(const PhaseSpaceField& field, int dim, double alpha_max,
                              bool check_trace_window, StateFixup* fixup) {
  if (field.domain != FieldDomain::Position)
    throw ValidationError("state_from_p expects a position-space field");
  if (dim < 1) throw ValidationError("state_from_p: dim must be >= 1");
  const GridSpec& grid = field.grid;
  const int npts = grid.points_per_axis;
  const double cell = grid.step() * grid.step();
  const double amax2 = alpha_max > 0.0 ? alpha_max * alpha_max : -1.0;

  // fixed partition count keeps the floating-point sum independent of the
  // worker count (bit-reproducible regardless of CSQPT_THREADS)
  const int nblocks = std::min(64, npts);
  std::vector<CMat> partial(nblocks, CMat::Zero(dim, dim));
  parallel_for(nblocks, [&](int w) {
    const int lo = npts * w / nblocks;
    const int hi = npts * (w + 1) / nblocks;
    CVec c(dim);
    CMat& acc = partial[w];
    for (int i = lo; i < hi; ++i) {
      const double x = grid.axis_value(i);
      for (int j = 0; j < npts; ++j) {
        const double p = grid.axis_value(j);
        const Amplitude alpha = alpha_of(x, p);
        if (amax2 >= 0.0 && std::norm(alpha) > amax2) continue;
        const Complex weight = field.values(i, j) * cell;
        if (weight == Complex(0.0, 0.0)) continue;
        // c_n = e^{−|α|²/2} αⁿ/√n! by recurrence
        c(0) = std::exp(-0.5 * std::norm(alpha));
        for (int n = 1; n < dim; ++n) c(n) = c(n - 1) * alpha / std::sqrt(double(n));
        acc.noalias() += weight * (c * c.adjoint());
      }
    }
  });
  CMat sum = CMat::Zero(dim, dim);
  for (const auto& m : partial) sum += m;

  StateFixup diag;
  const double pre_trace = sum.trace().real();
  if (check_trace_window && std::abs(pre_trace - 1.0) > 0.05) {
    std::ostringstream os;
    os << "state_from_p: pre-normalization trace " << pre_trace
       << " deviates from 1 by more than 0.05 (grid/L mismatch?)";
    throw NumericalContractError(os.str());
  }
  DensityMatrix rho = DensityMatrix::from_reconstruction(std::move(sum), &diag);
  if (fixup) *fixup = diag;
  return rho;
}

}  // namespace

DensityMatrix state_from_p(const PhaseSpaceField& p_field, int dim, StateFixup* fixup) {
  return quadrature_of_p(p_field, dim, -1.0, true, fixup);
}

DensityMatrix state_from_p_disk(const PhaseSpaceField& p_field, int dim,
                                double alpha_max, StateFixup* fixup) {
  if (!(alpha_max > 0.0)) throw ValidationError("state_from_p_disk: alpha_max must be > 0");
  return quadrature_of_p(p_field, dim, alpha_max, false, fixup);
}

}  // namespace csqpt
