#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csqpt/oracles.hpp"
#include "csqpt/phasespace.hpp"

namespace csqpt {

// Everything run_experiment needs; serialized as a flat JSON document, every
// field overridable by a CLI flag of the same name.
struct PipelineConfig {
  int dim = 8;         // tensor input/output Fock dimension
  int probe_dim = 58;  // probe-output representation + MLE dimension
  double grid_half_extent = 12.0;
  int grid_points = 512;
  double L = 4.0;
  std::vector<double> probe_amplitudes;  // real, nonnegative, sorted
  int samples_per_probe = 50000;
  int phases_per_probe = 12;  // linear scan over [0, π)
  std::uint64_t seed = 20260808;
  double eta = 0.66;
  double phase_deg = 36.0;
  int fit_degree = 3;
  int mean_fit_degree = 2;
  // probe-reproduction fidelity the fit must reach; 0 picks 0.999 for
  // noiseless runs and 0.995 for MLE runs (the fit smooths shot noise)
  double fit_fidelity_threshold = 0.0;
  int mle_max_iters = 2000;
  double mle_tol = 1e-9;
  double mle_efficiency = 1.0;
  bool noiseless = false;  // skip sampling+MLE, fit the exact channel outputs
  double squeezed_var_min = 0.3473;
  double squeezed_var_max = 0.9772;
  double squeezed_theta = 0.0;

  // 11 probe amplitudes on [0, 6], the EOM channel, 50k samples per probe.
  // The probe range must cover the support of every P_{L,nm} with n,m < dim,
  // which for dim 8 at L=4 reaches |α| ≈ 6 (probing up to |α| ≈ 11 would
  // need Fock dimensions beyond 160).
  static PipelineConfig paper_eom();

  GridSpec grid() const { return GridSpec(grid_half_extent, grid_points); }
  ChannelSpec channel() const { return {eta, phase_deg * M_PI / 180.0}; }
  void validate() const;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const std::filesystem::path& path, const PipelineConfig& config);

struct ExperimentSummary {
  double fidelity_tensor_vs_oracle = 0.0;
  double fidelity_direct_vs_oracle = 0.0;
  double route_equivalence_fidelity = 0.0;
  double trace_preservation_defect = 0.0;
  double choi_min_eigenvalue = 0.0;
  double removed_mass_ratio = 0.0;
  double probe_fit_min_fidelity = 0.0;
  double predicted_db_max = 0.0;
  double predicted_db_min = 0.0;
  double oracle_db_max = 0.0;
  double oracle_db_min = 0.0;
  bool mle_all_converged = true;
  bool noiseless = false;
};

// The full experiment: simulate probe inputs → oracle channel → homodyne
// sampling → MLE → fit-probes → superoperator → prediction on the squeezed
// vacuum → comparison against the oracle. Every intermediate artifact lands in
// workdir in the documented formats; summary.json is a pure function of
// (config, seed), wall-clock timings go to the timings.json sidecar. A stage
// failure aborts with the stage name; artifacts written so far stay.
ExperimentSummary run_experiment(const PipelineConfig& config,
                                 const std::filesystem::path& workdir);

}  // namespace csqpt
