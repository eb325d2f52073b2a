#include "csqpt/mle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <random>
#include <sstream>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"
#include "csqpt/oracles.hpp"

namespace csqpt {

namespace {

constexpr int kBinsPerPhase = 256;
constexpr double kProbFloor = 1e-300;

double fold_phase(double phi) {
  double f = std::fmod(phi, 2.0 * M_PI);
  if (f < 0.0) f += 2.0 * M_PI;
  return f;
}

}  // namespace

void HomodyneDataset::validate() const {
  if (samples.empty()) throw ValidationError("homodyne dataset is empty");
  if (!(efficiency > 0.0 && efficiency <= 1.0))
    throw ValidationError("homodyne dataset efficiency must be in (0, 1]");
  for (const auto& s : samples) {
    if (!std::isfinite(s.phase) || !std::isfinite(s.value))
      throw ValidationError("homodyne dataset contains non-finite entries");
  }
}

void hermite_functions(int dim, double x, double* psi) {
  // ψ_{n+1} = x√(2/(n+1)) ψ_n − √(n/(n+1)) ψ_{n−1}
  psi[0] = std::pow(M_PI, -0.25) * std::exp(-0.5 * x * x);
  if (dim == 1) return;
  psi[1] = std::sqrt(2.0) * x * psi[0];
  for (int n = 1; n + 1 < dim; ++n) {
    psi[n + 1] = x * std::sqrt(2.0 / (n + 1.0)) * psi[n] -
                 std::sqrt(n / (n + 1.0)) * psi[n - 1];
  }
}

double quadrature_pdf(const DensityMatrix& rho, double theta, double x) {
  const int dim = rho.dim();
  std::vector<double> psi(dim);
  hermite_functions(dim, x, psi.data());
  CVec u(dim);
  for (int n = 0; n < dim; ++n) u(n) = std::polar(psi[n], n * theta);
  const double pr = (u.adjoint() * rho.matrix() * u).value().real();
  return pr > 0.0 ? pr : 0.0;
}

HomodyneDataset sample_quadratures(const DensityMatrix& rho,
                                   const std::vector<double>& phases,
                                   int count_per_phase, std::uint64_t seed) {
  if (phases.empty()) throw ValidationError("sample_quadratures: no phases given");
  if (count_per_phase < 1)
    throw ValidationError("sample_quadratures: count_per_phase must be >= 1");

  HomodyneDataset out;
  out.samples.reserve(phases.size() * static_cast<size_t>(count_per_phase));
  std::mt19937_64 rng(seed);

  constexpr int kGrid = 4096;
  std::vector<double> cdf(kGrid), xs(kGrid);

  for (double theta : phases) {
    const double mean = quadrature_mean(rho, theta);
    const double sd = std::sqrt(std::max(quadrature_variance(rho, theta), 1e-6));
    const double lo = mean - 8.0 * sd, hi = mean + 8.0 * sd;
    const double dx = (hi - lo) / (kGrid - 1);
    double acc = 0.0;
    double prev = quadrature_pdf(rho, theta, lo);
    xs[0] = lo;
    cdf[0] = 0.0;
    for (int i = 1; i < kGrid; ++i) {
      xs[i] = lo + i * dx;
      const double cur = quadrature_pdf(rho, theta, xs[i]);
      acc += 0.5 * (prev + cur) * dx;
      cdf[i] = acc;
      prev = cur;
    }
    const double total = cdf[kGrid - 1];
    for (int i = 0; i < kGrid; ++i) cdf[i] /= total;

    const double folded = fold_phase(theta);
    for (int c = 0; c < count_per_phase; ++c) {
      // explicit 53-bit uniform keeps datasets identical across platforms
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      int idx = static_cast<int>(it - cdf.begin());
      double x;
      if (idx <= 0) {
        x = xs[0];
      } else {
        const double c0 = cdf[idx - 1], c1 = cdf[idx];
        const double t = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.5;
        x = xs[idx - 1] + t * dx;
      }
      out.samples.push_back({folded, x});
    }
  }
  return out;
}

namespace {

// Per-phase bin-integrated POVM in the phase-rotated frame:
//   Π_{θ,b} = U_θ S_b U_θ†,  S_b[n,m] = ∫_bin ψ_n ψ_m dx  (real symmetric).
// The efficiency pre-composition Λ† acts on S_b directly: Λ† preserves the
// e^{i(n−m)θ} phase pattern, so it commutes with the U_θ conjugation.
struct BinnedPovm {
  double x_max = 0.0;
  double bin_width = 0.0;
  std::vector<Eigen::MatrixXd> s;

  static BinnedPovm build(int dim, double efficiency) {
    BinnedPovm povm;
    povm.x_max = 6.0 * std::sqrt((2.0 * dim - 1.0) / 2.0);
    povm.bin_width = 2.0 * povm.x_max / kBinsPerPhase;
    povm.s.assign(kBinsPerPhase, Eigen::MatrixXd::Zero(dim, dim));

    // composite Simpson, 16 sub-intervals per bin
    constexpr int kSub = 16;
    std::vector<double> psi(dim);
    for (int b = 0; b < kBinsPerPhase; ++b) {
      const double a = -povm.x_max + b * povm.bin_width;
      const double h = povm.bin_width / kSub;
      Eigen::MatrixXd& sb = povm.s[b];
      for (int q = 0; q <= kSub; ++q) {
        const double x = a + q * h;
        const double w = (q == 0 || q == kSub) ? 1.0 : (q % 2 ? 4.0 : 2.0);
        hermite_functions(dim, x, psi.data());
        for (int n = 0; n < dim; ++n)
          for (int m = 0; m <= n; ++m) sb(n, m) += w * psi[n] * psi[m];
      }
      sb *= h / 3.0;
      sb.triangularView<Eigen::StrictlyUpper>() = sb.transpose();
    }
    if (efficiency < 1.0) {
      for (auto& sb : povm.s) {
        CMat smeared = loss_map_adjoint(sb.cast<Complex>(), efficiency);
        sb = smeared.real();
      }
    }
    return povm;
  }

  double completeness_defect() const {
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(s[0].rows(), s[0].cols());
    for (const auto& sb : s) sum += sb;
    sum -= Eigen::MatrixXd::Identity(sum.rows(), sum.cols());
    return sum.cwiseAbs().maxCoeff();
  }
};

struct PhaseGroup {
  double theta = 0.0;
  std::vector<long long> counts;
  long long total = 0;
};

std::vector<PhaseGroup> bin_samples(const HomodyneDataset& data, const BinnedPovm& povm) {
  std::map<double, int> index;
  std::vector<PhaseGroup> groups;
  for (const auto& smp : data.samples) {
    const double theta = fold_phase(smp.phase);
    auto [it, fresh] = index.try_emplace(theta, static_cast<int>(groups.size()));
    if (fresh) groups.push_back({theta, std::vector<long long>(kBinsPerPhase, 0), 0});
    PhaseGroup& g = groups[it->second];
    int b = static_cast<int>(std::floor((smp.value + povm.x_max) / povm.bin_width));
    b = std::clamp(b, 0, kBinsPerPhase - 1);
    ++g.counts[b];
    ++g.total;
  }
  return groups;
}

// U_θ† M U_θ, i.e. M into the rotated frame where the POVM is real.
CMat rotate_frame(const CMat& m, double theta) {
  const int dim = static_cast<int>(m.rows());
  CMat out(dim, dim);
  for (int n = 0; n < dim; ++n)
    for (int mm = 0; mm < dim; ++mm)
      out(n, mm) = m(n, mm) * std::polar(1.0, (mm - n) * theta);
  return out;
}

}  // namespace

double povm_completeness_defect(int dim, double efficiency) {
  return BinnedPovm::build(dim, efficiency).completeness_defect();
}

MleResult mle_reconstruct(const HomodyneDataset& data, int dim, const MleOptions& opts) {
  data.validate();
  if (dim < 1) throw ValidationError("mle_reconstruct: dim must be >= 1");

  const BinnedPovm povm = BinnedPovm::build(dim, data.efficiency);
  const std::vector<PhaseGroup> groups = bin_samples(data, povm);
  const double nsamples = static_cast<double>(data.samples.size());

  CMat rho = CMat::Identity(dim, dim) / double(dim);
  double prev_ll = -std::numeric_limits<double>::infinity();
  bool converged = false;
  int iters = 0;

  for (int it = 0; it < opts.max_iters; ++it) {
    double ll = 0.0;
    CMat r_total = CMat::Zero(dim, dim);
    for (const auto& g : groups) {
      const CMat rho_rot = rotate_frame(rho, g.theta);
      Eigen::MatrixXd r_rot = Eigen::MatrixXd::Zero(dim, dim);
      for (int b = 0; b < kBinsPerPhase; ++b) {
        if (g.counts[b] == 0) continue;
        // Tr(S_b ρ_rot) with S real symmetric
        double p = (povm.s[b].array() * rho_rot.real().array()).sum();
        p = std::max(p, kProbFloor);
        ll += static_cast<double>(g.counts[b]) * std::log(p);
        r_rot += (static_cast<double>(g.counts[b]) / p) * povm.s[b];
      }
      r_total += rotate_frame(r_rot.cast<Complex>(), -g.theta);
    }

    if (ll < prev_ll - 1e-12 * nsamples) {
      std::ostringstream os;
      os << "mle_reconstruct: log-likelihood decreased from " << prev_ll << " to "
         << ll << " at iteration " << it;
      throw NumericalContractError(os.str());
    }
    const double gain = (it == 0) ? std::numeric_limits<double>::infinity()
                                  : (ll - prev_ll) / nsamples;
    prev_ll = ll;
    iters = it + 1;
    if (gain < opts.tol) {
      converged = true;
      break;
    }

    CMat next = r_total * rho * r_total;
    next = 0.5 * (next + next.adjoint().eval());
    const double tr = next.trace().real();
    if (!(tr > 0.0)) throw NumericalContractError("mle_reconstruct: iterate lost its trace");
    rho = next / tr;
  }

  return MleResult{DensityMatrix::unchecked(std::move(rho)), converged, iters, prev_ll,
                   povm.completeness_defect()};
}

double log_likelihood(const HomodyneDataset& data, const DensityMatrix& rho) {
  data.validate();
  // Tr[Λ(ρ)Π] = Tr[ρ Λ†(Π)]: fold the efficiency into the state once
  const DensityMatrix effective =
      (data.efficiency < 1.0) ? loss_channel(rho, data.efficiency) : rho;
  double ll = 0.0;
  for (const auto& s : data.samples) {
    const double p = std::max(quadrature_pdf(effective, s.phase, s.value), kProbFloor);
    ll += std::log(p);
  }
  return ll;
}

}  // namespace csqpt
