#include "csqpt/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"

namespace csqpt {

namespace {

int recon_dim_for(int n, const CalibrationOptions& opts) {
  return opts.recon_dim > 0 ? opts.recon_dim : 2 * n + 16;
}

void require_target(double target) {
  if (!(target > 0.0 && target < 1.0))
    throw ValidationError("calibration: target fidelity must be in (0, 1)");
}

// Round-trip fidelity ⟨n|ρ_rec|n⟩ of the full-grid quadrature of P_{L,nn}.
double round_trip_fidelity(int n, double L, const GridSpec& grid, int dim_rec) {
  PhaseSpaceField field = regularized_p_fock_pair(n, n, L, grid);
  DensityMatrix rec = state_from_p_disk(field, dim_rec, grid.half_extent / std::sqrt(2.0));
  return fidelity(fock_state(n, dim_rec), rec);
}

}  // namespace

double required_L(int n, double target_fidelity, const GridSpec& grid,
                  const CalibrationOptions& opts, double min_l) {
  if (n < 0) throw ValidationError("required_L: n must be >= 0");
  require_target(target_fidelity);
  const int dim_rec = recon_dim_for(n, opts);
  const double l_cap = grid.conjugate_half_extent() - 4.0;
  const int first = std::max(1, static_cast<int>(std::ceil((min_l - 1e-12) / opts.l_step)));
  for (int step = first;; ++step) {
    const double L = step * opts.l_step;
    if (L > l_cap) {
      std::ostringstream os;
      os << "required_L(n=" << n << ", target=" << target_fidelity
         << "): ladder exceeded the grid's usable cutoff " << l_cap
         << "; need conjugate half-extent > " << L + 4.0 << " (points_per_axis > "
         << 2.0 * grid.half_extent * (L + 4.0) / M_PI << " at half_extent "
         << grid.half_extent << ")";
      throw ValidationError(os.str());
    }
    if (round_trip_fidelity(n, L, grid, dim_rec) >= target_fidelity) return L;
  }
}

double required_alpha_max(int n, double target_fidelity, double L, const GridSpec& grid,
                          const CalibrationOptions& opts) {
  if (n < 0) throw ValidationError("required_alpha_max: n must be >= 0");
  require_target(target_fidelity);
  const int dim_rec = recon_dim_for(n, opts);
  PhaseSpaceField field = regularized_p_fock_pair(n, n, L, grid);

  // One pass over radius-sorted nodes; the pure-target fidelity of the
  // truncated quadrature is Re acc(n,n)/Re tr(acc), so every ladder point
  // falls out of one prefix accumulation.
  const int npts = grid.points_per_axis;
  const double h = grid.step();
  struct NodeKey {
    long long r2;
    int i, j;
  };
  std::vector<NodeKey> order;
  order.reserve(static_cast<size_t>(npts) * npts);
  for (int i = 0; i < npts; ++i) {
    const long long di = i - npts / 2;
    for (int j = 0; j < npts; ++j) {
      const long long dj = j - npts / 2;
      order.push_back({di * di + dj * dj, i, j});
    }
  }
  std::sort(order.begin(), order.end(),
            [](const NodeKey& a, const NodeKey& b) { return a.r2 < b.r2; });

  const double cell = h * h;
  const double alpha_cap = grid.half_extent / std::sqrt(2.0);
  CVec c(dim_rec);
  double acc_nn = 0.0, acc_tr = 0.0;
  size_t cursor = 0;
  const int max_step = static_cast<int>(std::floor(alpha_cap / opts.alpha_step));
  // F(a) oscillates with the P-function rings, so a single upward crossing can
  // be transient; the answer is the smallest ladder point from which the
  // target holds for every larger radius too.
  std::vector<double> fidelity_at(max_step + 1, 0.0);
  for (int step = 1; step <= max_step; ++step) {
    const double a_ladder = step * opts.alpha_step;
    const long long key_cap =
        static_cast<long long>(std::floor(2.0 * a_ladder * a_ladder / (h * h) + 1e-9));
    for (; cursor < order.size() && order[cursor].r2 <= key_cap; ++cursor) {
      const auto& node = order[cursor];
      const Complex weight = field.values(node.i, node.j) * cell;
      if (weight == Complex(0.0, 0.0)) continue;
      const Amplitude alpha = alpha_of(grid.axis_value(node.i), grid.axis_value(node.j));
      c(0) = std::exp(-0.5 * std::norm(alpha));
      for (int q = 1; q < dim_rec; ++q) c(q) = c(q - 1) * alpha / std::sqrt(double(q));
      // only the (n,n) entry and the trace of Σ w·cc† are needed
      acc_nn += (weight * c(n) * std::conj(c(n))).real();
      acc_tr += (weight * c.squaredNorm()).real();
    }
    fidelity_at[step] = (acc_tr > 1e-12) ? acc_nn / acc_tr : 0.0;
  }
  int answer = 0;
  for (int step = max_step; step >= 1; --step) {
    if (fidelity_at[step] < target_fidelity) break;
    answer = step;
  }
  if (answer > 0) return answer * opts.alpha_step;
  std::ostringstream os;
  os << "required_alpha_max(n=" << n << ", target=" << target_fidelity << ", L=" << L
     << "): target unreachable within the grid extent (|alpha| <= " << alpha_cap
     << "); the Klauder deficit at this L may exceed the target";
  throw ValidationError(os.str());
}

CalibrationCurve required_L_curve(int max_n, double target_fidelity, const GridSpec& grid,
                                  const CalibrationOptions& opts) {
  CalibrationCurve curve;
  curve.target_fidelity = target_fidelity;
  double warm = 0.0;
  for (int n = 0; n <= max_n; ++n) {
    // the curve need not be strictly monotone on a coarse ladder: back off one
    // step from the previous result before scanning
    warm = std::max(0.0, warm - opts.l_step);
    const double L = required_L(n, target_fidelity, grid, opts, warm);
    curve.n_values.push_back(n);
    curve.parameter_values.push_back(L);
    warm = L;
  }
  return curve;
}

CalibrationCurve required_alpha_max_curve(int max_n, double target_fidelity, double L,
                                          const GridSpec& grid,
                                          const CalibrationOptions& opts) {
  CalibrationCurve curve;
  curve.target_fidelity = target_fidelity;
  for (int n = 0; n <= max_n; ++n) {
    curve.n_values.push_back(n);
    curve.parameter_values.push_back(required_alpha_max(n, target_fidelity, L, grid, opts));
  }
  return curve;
}

double wigner_mass_radius(int n, const GridSpec& grid, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw ValidationError("wigner_mass_radius: fraction must be in (0, 1)");
  PhaseSpaceField w = wigner_fock_pair(n, n, grid);
  const int npts = grid.points_per_axis;
  struct Entry {
    double r2;
    double mass;
  };
  std::vector<Entry> entries;
  entries.reserve(static_cast<size_t>(npts) * npts);
  double total = 0.0;
  for (int i = 0; i < npts; ++i) {
    const double x = grid.axis_value(i);
    for (int j = 0; j < npts; ++j) {
      const double p = grid.axis_value(j);
      const double mass = std::abs(w.values(i, j));
      entries.push_back({x * x + p * p, mass});
      total += mass;
    }
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.r2 < b.r2; });
  double acc = 0.0;
  for (const auto& e : entries) {
    acc += e.mass;
    if (acc >= fraction * total) return std::sqrt(e.r2 / 2.0);  // α units
  }
  return grid.half_extent / std::sqrt(2.0);
}

}  // namespace csqpt
