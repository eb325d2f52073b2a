// Centered 2-D DFT pair built on FFTW. For node values f_j at x_j = (j − N/2)h
// and k_m = (m − N/2)·2π/(Nh), with N ≡ 0 (mod 4):
//   Σ_j f_j e^{−i k_m x_j} = (−1)^m Σ_j [f_j (−1)^j] e^{−2πi mj/N},
// so both directions are a plain FFT wrapped in checkerboard sign flips.

#include <fftw3.h>

#include <mutex>
#include <sstream>
#include <unordered_map>

#include "csqpt/errors.hpp"
#include "csqpt/phasespace.hpp"

namespace csqpt {

GridSpec::GridSpec(double he, int n) : half_extent(he), points_per_axis(n) {
  if (!(half_extent > 0.0)) throw ValidationError("GridSpec: half_extent must be > 0");
  if (n < 64 || (n & (n - 1)) != 0) {
    std::ostringstream os;
    os << "GridSpec: points_per_axis=" << n << " must be a power of two >= 64";
    throw ValidationError(os.str());
  }
}

PhaseSpaceField::PhaseSpaceField(const GridSpec& g, FieldDomain d)
    : grid(g), domain(d), values(CMat::Zero(g.points_per_axis, g.points_per_axis)) {}

Complex PhaseSpaceField::integral() const {
  const double cell = (domain == FieldDomain::Position)
                          ? grid.step() * grid.step()
                          : grid.conjugate_step() * grid.conjugate_step();
  return values.sum() * cell;
}

void PhaseSpaceField::require_finite(const char* what) const {
  if (!values.allFinite()) {
    std::ostringstream os;
    os << what << ": phase-space field contains non-finite values";
    throw NumericalContractError(os.str());
  }
}

namespace {

// One cached plan per grid size; FFTW planning is not thread-safe, execution
// on distinct arrays is.
class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  std::pair<fftw_plan, fftw_plan> plans_for(int n) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    CMat scratch_in(n, n), scratch_out(n, n);
    auto* in = reinterpret_cast<fftw_complex*>(scratch_in.data());
    auto* out = reinterpret_cast<fftw_complex*>(scratch_out.data());
    // FFTW_ESTIMATE keeps plan choice deterministic; FFTW_UNALIGNED lets the
    // new-array interface run on any heap buffer.
    fftw_plan fwd = fftw_plan_dft_2d(n, n, in, out, FFTW_FORWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    fftw_plan bwd = fftw_plan_dft_2d(n, n, in, out, FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!fwd || !bwd) throw NumericalContractError("FFTW plan creation failed");
    plans_.emplace(n, std::make_pair(fwd, bwd));
    return {fwd, bwd};
  }

 private:
  std::mutex mutex_;
  std::unordered_map<int, std::pair<fftw_plan, fftw_plan>> plans_;
};

void checkerboard(CMat& m) {
  const int n = static_cast<int>(m.rows());
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i)
      if ((i + j) & 1) m(i, j) = -m(i, j);
}

CMat transform(const CMat& in, int direction) {
  const int n = static_cast<int>(in.rows());
  auto [fwd, bwd] = PlanCache::instance().plans_for(n);
  CMat work = in;
  checkerboard(work);
  CMat out(n, n);
  fftw_execute_dft(direction == FFTW_FORWARD ? fwd : bwd,
                   reinterpret_cast<fftw_complex*>(work.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  checkerboard(out);
  return out;
}

}  // namespace

PhaseSpaceField fourier_forward(const PhaseSpaceField& f) {
  if (f.domain != FieldDomain::Position)
    throw ValidationError("fourier_forward expects a position-space field");
  PhaseSpaceField out(f.grid, FieldDomain::Frequency);
  const double h = f.grid.step();
  out.values = transform(f.values, FFTW_FORWARD) * (h * h);
  return out;
}

PhaseSpaceField fourier_inverse(const PhaseSpaceField& f) {
  if (f.domain != FieldDomain::Frequency)
    throw ValidationError("fourier_inverse expects a frequency-space field");
  PhaseSpaceField out(f.grid, FieldDomain::Position);
  const int n = f.grid.points_per_axis;
  const double h = f.grid.step();
  out.values = transform(f.values, FFTW_BACKWARD) / (h * h * double(n) * double(n));
  return out;
}

}  // namespace csqpt
