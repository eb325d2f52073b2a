#include "csqpt/proctensor.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"
#include "csqpt/threading.hpp"

namespace csqpt {

// ---------------------------------------------------------------------------
// Superoperator basics
// ---------------------------------------------------------------------------

CMat apply_superoperator_raw(const Superoperator& sop, const CMat& rho) {
  if (rho.rows() != sop.dim_in || rho.cols() != sop.dim_in)
    throw ValidationError("apply_superoperator: input dim mismatch");
  using RowMat = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  Eigen::Map<const RowMat> m(sop.tensor.data(), sop.dim_out * sop.dim_out,
                             sop.dim_in * sop.dim_in);
  RowMat rho_row = rho;
  Eigen::Map<const CVec> vec_in(rho_row.data(), sop.dim_in * sop.dim_in);
  CVec vec_out = m * vec_in;
  CMat out(sop.dim_out, sop.dim_out);
  for (int l = 0; l < sop.dim_out; ++l)
    for (int k = 0; k < sop.dim_out; ++k) out(l, k) = vec_out(l * sop.dim_out + k);
  return out;
}

DensityMatrix apply_superoperator(const Superoperator& sop, const DensityMatrix& rho,
                                  StateFixup* fixup) {
  return DensityMatrix::from_reconstruction(apply_superoperator_raw(sop, rho.matrix()),
                                            fixup);
}

double trace_preservation_defect(const Superoperator& sop) {
  double worst = 0.0;
  for (int n = 0; n < sop.dim_in; ++n) {
    for (int m = 0; m < sop.dim_in; ++m) {
      Complex sum(0.0, 0.0);
      for (int l = 0; l < sop.dim_out; ++l) sum += sop.at(l, l, n, m);
      if (n == m) sum -= 1.0;
      worst = std::max(worst, std::abs(sum));
    }
  }
  return worst;
}

double choi_min_eigenvalue(const Superoperator& sop) {
  const int din = sop.dim_in, dout = sop.dim_out;
  CMat choi(din * dout, din * dout);
  for (int n = 0; n < din; ++n)
    for (int l = 0; l < dout; ++l)
      for (int m = 0; m < din; ++m)
        for (int k = 0; k < dout; ++k)
          choi(n * dout + l, m * dout + k) = sop.at(l, k, n, m);
  choi = 0.5 * (choi + choi.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<CMat> es(choi, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

// ---------------------------------------------------------------------------
// Probe interpolation
// ---------------------------------------------------------------------------

namespace {

CVec poly_powers(double a, int degree) {
  CVec t(degree + 1);
  double p = 1.0;
  for (int c = 0; c <= degree; ++c, p *= a) t(c) = p;
  return t;
}

}  // namespace

Amplitude InterpolatedResponse::mean_at(double a) const {
  Complex v(0.0, 0.0);
  double p = 1.0;
  for (const auto& c : mean_fit) {
    v += c * p;
    p *= a;
  }
  return v;
}

CMat InterpolatedResponse::centered_at(double a) const {
  CVec powers = poly_powers(a, degree);
  CVec flat = centered_fits * powers;
  CMat m(dim, dim);
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k < dim; ++k) m(l, k) = flat(l * dim + k);
  return m;
}

void InterpolatedResponse::validate() const {
  if (dim < 1) throw ValidationError("interpolated response: dim must be >= 1");
  if (amplitudes.size() < static_cast<size_t>(degree + 1))
    throw ValidationError("interpolated response: fewer probes than fit coefficients");
  if (!std::is_sorted(amplitudes.begin(), amplitudes.end()))
    throw ValidationError("interpolated response: amplitudes must be sorted");
  if (amplitudes.front() < 0.0)
    throw ValidationError("interpolated response: amplitudes must be nonnegative");
  if (static_cast<int>(mean_fit.size()) != mean_degree + 1)
    throw ValidationError("interpolated response: mean_fit size mismatch");
  if (centered_fits.rows() != static_cast<long>(dim) * dim ||
      centered_fits.cols() != degree + 1)
    throw ValidationError("interpolated response: centered_fits shape mismatch");
  if (!phase_symmetric)
    throw ValidationError("interpolated response: only phase-symmetric fits supported");
}

InterpolatedResponse center_and_fit(const std::vector<ProbeRecord>& probes, int degree,
                                    int mean_degree, double fidelity_threshold) {
  if (degree < 0 || mean_degree < 0) throw ValidationError("center_and_fit: negative degree");
  if (probes.size() < static_cast<size_t>(std::max(degree, mean_degree)) + 1) {
    std::ostringstream os;
    os << "center_and_fit: " << probes.size() << " probes cannot support degree "
       << std::max(degree, mean_degree);
    throw ValidationError(os.str());
  }

  std::vector<const ProbeRecord*> sorted;
  for (const auto& p : probes) {
    if (std::abs(p.alpha.imag()) > 1e-12)
      throw ValidationError("center_and_fit: complex probe amplitudes are not supported; "
                            "phase symmetry covers them");
    if (p.alpha.real() < 0.0)
      throw ValidationError("center_and_fit: probe amplitudes must be nonnegative");
    sorted.push_back(&p);
  }
  std::sort(sorted.begin(), sorted.end(), [](const ProbeRecord* a, const ProbeRecord* b) {
    return a->alpha.real() < b->alpha.real();
  });
  const int dim = sorted.front()->output.dim();
  for (size_t i = 0; i < sorted.size(); ++i) {
    if (sorted[i]->output.dim() != dim)
      throw ValidationError("center_and_fit: probe outputs must share one dim");
    if (i > 0 && !(sorted[i]->alpha.real() > sorted[i - 1]->alpha.real() + 1e-12))
      throw ValidationError("center_and_fit: probe amplitudes must be distinct");
  }

  const int np = static_cast<int>(sorted.size());
  InterpolatedResponse fit;
  fit.dim = dim;
  fit.degree = degree;
  fit.mean_degree = mean_degree;
  fit.fidelity_threshold = fidelity_threshold;
  fit.amplitudes.reserve(np);

  CVec means(np);
  CMat centered_flat(np, dim * dim);
  for (int i = 0; i < np; ++i) {
    const ProbeRecord& probe = *sorted[i];
    fit.amplitudes.push_back(probe.alpha.real());
    const Amplitude mean = mean_amplitude(probe.output);
    means(i) = mean;
    // allow_truncation: MLE noise leaves harmless dust near the cutoff that
    // the strict displacement guard would reject
    DensityMatrix centered = displace(probe.output, -mean, /*allow_truncation=*/true);
    for (int l = 0; l < dim; ++l)
      for (int k = 0; k < dim; ++k) centered_flat(i, l * dim + k) = centered.entry(l, k);
  }

  auto vandermonde = [&](int deg) {
    CMat v(np, deg + 1);
    for (int i = 0; i < np; ++i) v.row(i) = poly_powers(fit.amplitudes[i], deg).transpose();
    return v;
  };

  // ⟨â⟩ fit
  {
    CMat v = vandermonde(mean_degree);
    Eigen::ColPivHouseholderQR<CMat> qr(v);
    if (qr.rank() < mean_degree + 1)
      throw ValidationError("center_and_fit: rank-deficient mean-amplitude fit");
    CVec coef = qr.solve(means);
    fit.mean_fit.assign(coef.data(), coef.data() + coef.size());
  }

  // centered element fits, one shared QR
  {
    CMat v = vandermonde(degree);
    Eigen::ColPivHouseholderQR<CMat> qr(v);
    if (qr.rank() < degree + 1)
      throw ValidationError("center_and_fit: rank-deficient element fit");
    CMat sol = qr.solve(centered_flat);           // (degree+1) × dim²
    fit.centered_fits = sol.transpose();          // dim² × (degree+1)
    CMat resid = v * sol - centered_flat;
    int worst_row = 0, worst_col = 0;
    fit.max_element_residual = resid.cwiseAbs().maxCoeff(&worst_row, &worst_col);
  }

  // interpolation-consistency check at the probe points
  double min_f = 1.0;
  int worst_probe = 0;
  for (int i = 0; i < np; ++i) {
    const double f = fidelity(response_at(fit, fit.amplitudes[i]), sorted[i]->output, 0.05);
    if (f < min_f) {
      min_f = f;
      worst_probe = i;
    }
  }
  fit.min_probe_fidelity = min_f;
  if (min_f < fidelity_threshold) {
    // find the element the fit reproduces worst at the offending probe
    const double a = fit.amplitudes[worst_probe];
    CMat model = fit.centered_at(a);
    DensityMatrix centered =
        displace(sorted[worst_probe]->output, -fit.mean_at(a), true);
    int wl = 0, wk = 0;
    (model - centered.matrix()).cwiseAbs().maxCoeff(&wl, &wk);
    std::ostringstream os;
    os << "center_and_fit: fit reproduces probe a=" << a << " with fidelity " << min_f
       << " < " << fidelity_threshold << "; worst element (l,k)=(" << wl << "," << wk
       << ")";
    throw NumericalContractError(os.str());
  }
  return fit;
}

DensityMatrix response_at(const InterpolatedResponse& fit, Amplitude alpha,
                          StateFixup* fixup) {
  fit.validate();
  const double a = std::abs(alpha);
  if (a > fit.max_amplitude() * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "response_at: |alpha|=" << a << " outside the fitted range [0, "
       << fit.max_amplitude() << "]";
    throw ValidationError(os.str());
  }
  const Amplitude mean = fit.mean_at(a);
  CMat d = displacement_operator(mean, fit.dim);
  CMat real_axis = d * fit.centered_at(a) * d.adjoint();
  const double phi = (a > 0.0) ? std::arg(alpha) : 0.0;
  if (phi != 0.0) {
    for (int l = 0; l < fit.dim; ++l)
      for (int k = 0; k < fit.dim; ++k) real_axis(l, k) *= std::polar(1.0, (l - k) * phi);
  }
  return DensityMatrix::from_reconstruction(std::move(real_axis), fixup);
}

// ---------------------------------------------------------------------------
// Grid integration against the responses (tensor and direct routes)
// ---------------------------------------------------------------------------

namespace {

// Grid nodes inside the integration disk |α| ≤ alpha_max, with responses
// cached per unique radius (phase symmetry: ϱ(a·e^{iφ})_{lk} = e^{i(l−k)φ}ϱ(a)_{lk}).
struct DiskResponses {
  struct Node {
    int i, j;          // grid indices
    int radius_index;  // into responses
    double phi;        // arg α
  };
  std::vector<Node> nodes;
  std::vector<CMat> responses;  // dim_out×dim_out, un-normalized fit output
  int dim_out = 0;

  static DiskResponses build(const InterpolatedResponse& fit, const GridSpec& grid,
                             int dim_out) {
    fit.validate();
    if (dim_out < 1 || dim_out > fit.dim)
      throw ValidationError("integration: dim_out must be in [1, fit.dim]");
    DiskResponses out;
    out.dim_out = dim_out;

    const int npts = grid.points_per_axis;
    const double h = grid.step();
    const double alpha_cap = std::min(fit.max_amplitude(), grid.half_extent / std::sqrt(2.0));
    // integer squared radius keys make the dedup exact
    const long long cap_key = static_cast<long long>(
        std::floor(2.0 * alpha_cap * alpha_cap / (h * h) + 1e-9));
    std::map<long long, int> radius_of;
    for (int i = 0; i < npts; ++i) {
      const long long di = i - npts / 2;
      for (int j = 0; j < npts; ++j) {
        const long long dj = j - npts / 2;
        const long long key = di * di + dj * dj;
        if (key > cap_key) continue;
        auto [it, fresh] = radius_of.try_emplace(key, static_cast<int>(radius_of.size()));
        out.nodes.push_back(
            {i, j, it->second, std::atan2(grid.axis_value(j), grid.axis_value(i))});
      }
    }

    std::vector<double> radii(radius_of.size());
    for (const auto& [key, idx] : radius_of)
      radii[idx] = h * std::sqrt(static_cast<double>(key)) / std::sqrt(2.0);

    out.responses.assign(radii.size(), CMat());
    parallel_for(static_cast<int>(radii.size()), [&](int r) {
      const double a = std::min(radii[r], fit.max_amplitude());
      const Amplitude mean = fit.mean_at(a);
      CMat d = displacement_operator(mean, fit.dim);
      CMat full = d * fit.centered_at(a) * d.adjoint();
      out.responses[r] = full.topLeftCorner(dim_out, dim_out);
    });
    return out;
  }
};

void require_grid_supports(double L, const GridSpec& grid, const char* op) {
  if (!(grid.conjugate_half_extent() > L + 4.0)) {
    std::ostringstream os;
    os << op << ": grid conjugate half-extent " << grid.conjugate_half_extent()
       << " must exceed L+4 = " << L + 4.0;
    throw ValidationError(os.str());
  }
}

}  // namespace

Superoperator reconstruct_superoperator(const InterpolatedResponse& fit, double L,
                                        const GridSpec& grid, int dim_in,
                                        const ReconstructionOptions& opts) {
  require_grid_supports(L, grid, "reconstruct_superoperator");
  if (dim_in < 1) throw ValidationError("reconstruct_superoperator: dim_in must be >= 1");
  const int dim_out = opts.dim_out > 0 ? opts.dim_out : fit.dim;
  const DiskResponses disk = DiskResponses::build(fit, grid, dim_out);
  const double cell = grid.step() * grid.step();
  const size_t nnodes = disk.nodes.size();
  if (nnodes == 0)
    throw ValidationError("reconstruct_superoperator: empty integration disk");

  const int npairs = dim_in * dim_in;
  const int nelems = dim_out * dim_out;

  // response matrix R(node, element) with the per-node phase factors applied
  CMat resp(nnodes, nelems);
  parallel_for(static_cast<int>(nnodes), [&](int t) {
    const auto& node = disk.nodes[t];
    const CMat& base = disk.responses[node.radius_index];
    std::vector<Complex> ph(2 * dim_out - 1);
    for (int d = -(dim_out - 1); d <= dim_out - 1; ++d)
      ph[d + dim_out - 1] = std::polar(1.0, d * node.phi);
    for (int l = 0; l < dim_out; ++l)
      for (int k = 0; k < dim_out; ++k)
        resp(t, l * dim_out + k) = base(l, k) * ph[l - k + dim_out - 1];
  });

  // P matrix P(pair, node): every P_{L,nm} evaluated on the disk
  CMat pmat(npairs, nnodes);
  double worst_total_mass = 0.0, worst_disk_mass = 0.0;
  {
    std::mutex mass_mutex;
    parallel_for(npairs, [&](int pair) {
      const int n = pair / dim_in, m = pair % dim_in;
      PhaseSpaceField field = regularized_p_fock_pair(n, m, L, grid);
      for (size_t t = 0; t < nnodes; ++t)
        pmat(pair, t) = field.values(disk.nodes[t].i, disk.nodes[t].j);
      if (n == dim_in - 1 && m == dim_in - 1) {
        double total = field.values.cwiseAbs().sum();
        double in_disk = 0.0;
        for (size_t t = 0; t < nnodes; ++t)
          in_disk += std::abs(field.values(disk.nodes[t].i, disk.nodes[t].j));
        std::lock_guard<std::mutex> lock(mass_mutex);
        worst_total_mass = total;
        worst_disk_mass = in_disk;
      }
    });
  }
  if (opts.mass_coverage_warn > 0.0 && worst_total_mass > 0.0 &&
      worst_disk_mass < opts.mass_coverage_warn * worst_total_mass) {
    std::cerr << "warning: reconstruct_superoperator: integration disk (|alpha| <= "
              << std::min(fit.max_amplitude(), grid.half_extent / std::sqrt(2.0))
              << ") holds only " << worst_disk_mass / worst_total_mass
              << " of the worst-case |P_L| mass; extend the probe amplitudes\n";
  }

  // E(pair, element) = cell · P · R
  CMat e = cell * (pmat * resp);

  Superoperator sop(dim_in, dim_out);
  for (int n = 0; n < dim_in; ++n)
    for (int m = 0; m < dim_in; ++m)
      for (int l = 0; l < dim_out; ++l)
        for (int k = 0; k < dim_out; ++k)
          sop.at(l, k, n, m) = e(n * dim_in + m, l * dim_out + k);

  // exact-in-theory Hermiticity pairing: clean up roundoff
  for (int n = 0; n < dim_in; ++n)
    for (int m = 0; m <= n; ++m)
      for (int l = 0; l < dim_out; ++l)
        for (int k = 0; k < dim_out; ++k) {
          const Complex avg =
              0.5 * (sop.at(l, k, n, m) + std::conj(sop.at(k, l, m, n)));
          sop.at(l, k, n, m) = avg;
          sop.at(k, l, m, n) = std::conj(avg);
        }

  if (opts.enforce_phase_symmetry) {
    double off = 0.0, all = 0.0;
    for (int n = 0; n < dim_in; ++n)
      for (int m = 0; m < dim_in; ++m)
        for (int l = 0; l < dim_out; ++l)
          for (int k = 0; k < dim_out; ++k) {
            const double mag2 = std::norm(sop.at(l, k, n, m));
            all += mag2;
            if (l - k != n - m) {
              off += mag2;
              sop.at(l, k, n, m) = Complex(0.0, 0.0);
            }
          }
    sop.phase_symmetric = true;
    sop.removed_mass_ratio = all > 0.0 ? std::sqrt(off / all) : 0.0;
  }
  return sop;
}

namespace {

DensityMatrix integrate_against_responses(const PhaseSpaceField& pfield,
                                          const DiskResponses& disk, const GridSpec& grid,
                                          StateFixup* fixup) {
  const double cell = grid.step() * grid.step();
  const int dim = static_cast<int>(disk.responses.front().rows());

  // fixed partition count: the sum stays bit-identical for any worker count
  const size_t nnodes = disk.nodes.size();
  const int nblocks = static_cast<int>(std::min<size_t>(64, nnodes));
  std::vector<CMat> partial(nblocks, CMat::Zero(dim, dim));
  parallel_for(nblocks, [&](int w) {
    const size_t lo = nnodes * w / nblocks, hi = nnodes * (w + 1) / nblocks;
    CMat& acc = partial[w];
    std::vector<Complex> ph(2 * dim - 1);
    for (size_t t = lo; t < hi; ++t) {
      const auto& node = disk.nodes[t];
      const Complex weight = pfield.values(node.i, node.j) * cell;
      const CMat& base = disk.responses[node.radius_index];
      for (int d = -(dim - 1); d <= dim - 1; ++d)
        ph[d + dim - 1] = std::polar(1.0, d * node.phi);
      for (int l = 0; l < dim; ++l)
        for (int k = 0; k < dim; ++k)
          acc(l, k) += weight * base(l, k) * ph[l - k + dim - 1];
    }
  });
  CMat sum = CMat::Zero(dim, dim);
  for (const auto& m : partial) sum += m;
  return DensityMatrix::from_reconstruction(std::move(sum), fixup);
}

}  // namespace

DensityMatrix predict_output_direct(const DensityMatrix& rho,
                                    const InterpolatedResponse& fit, double L,
                                    const GridSpec& grid, StateFixup* fixup) {
  require_grid_supports(L, grid, "predict_output_direct");
  const DiskResponses disk = DiskResponses::build(fit, grid, fit.dim);
  return integrate_against_responses(regularized_p(rho, L, grid), disk, grid, fixup);
}

std::vector<DensityMatrix> predict_output_direct_batch(
    const std::vector<DensityMatrix>& states, const InterpolatedResponse& fit, double L,
    const GridSpec& grid) {
  require_grid_supports(L, grid, "predict_output_direct");
  const DiskResponses disk = DiskResponses::build(fit, grid, fit.dim);
  std::vector<DensityMatrix> out;
  out.reserve(states.size());
  for (const auto& rho : states)
    out.push_back(integrate_against_responses(regularized_p(rho, L, grid), disk, grid, nullptr));
  return out;
}

}  // namespace csqpt
