// csqpt — coherent-state quantum process tomography toolkit.
//
// One binary, one subcommand per pipeline stage. Exit codes: 0 success,
// 1 validation failure (bad input files or flags), 2 numerical-contract
// failure (trace drift, truncation overflow, likelihood decrease, ...).

#include <CLI11.hpp>
#include <iostream>

#include "csqpt/calibration.hpp"
#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"
#include "csqpt/io.hpp"
#include "csqpt/mle.hpp"
#include "csqpt/oracles.hpp"
#include "csqpt/pipeline.hpp"
#include "csqpt/proctensor.hpp"
#include "csqpt/validate.hpp"

using namespace csqpt;

namespace {

struct GridFlags {
  double extent = 12.0;
  int points = 512;

  void attach(CLI::App* cmd) {
    cmd->add_option("--grid-extent", extent, "grid half-extent in x/p")
        ->capture_default_str();
    cmd->add_option("--grid-points", points, "grid points per axis (power of two >= 64)")
        ->capture_default_str();
  }
  GridSpec spec() const { return GridSpec(extent, points); }
};

void add_sample(CLI::App& app) {
  auto* cmd = app.add_subcommand("sample", "simulate homodyne quadrature data");
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto phases = std::make_shared<int>(12);
  auto count = std::make_shared<int>(4167);
  auto seed = std::make_shared<std::uint64_t>(1);
  cmd->add_option("--state", *state, "input DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "output quadrature CSV")->required();
  cmd->add_option("--phases", *phases, "number of LO phases, linear scan over [0,pi)")
      ->capture_default_str();
  cmd->add_option("--count-per-phase", *count, "samples per phase")->capture_default_str();
  cmd->add_option("--seed", *seed, "RNG seed")->capture_default_str();
  cmd->callback([=] {
    DensityMatrix rho = io::read_density_matrix(*state);
    std::vector<double> ph(*phases);
    for (int k = 0; k < *phases; ++k) ph[k] = M_PI * k / *phases;
    io::write_quadratures(*out, sample_quadratures(rho, ph, *count, *seed));
  });
}

void add_mle(CLI::App& app) {
  auto* cmd = app.add_subcommand("mle", "maximum-likelihood state reconstruction");
  auto data = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto dim = std::make_shared<int>(14);
  auto eta = std::make_shared<double>(1.0);
  auto iters = std::make_shared<int>(2000);
  auto tol = std::make_shared<double>(1e-9);
  cmd->add_option("--data", *data, "quadrature CSV")->required();
  cmd->add_option("--out", *out, "output DensityMatrix JSON")->required();
  cmd->add_option("--dim", *dim, "Fock cutoff")->capture_default_str();
  cmd->add_option("--eta", *eta, "assumed detection efficiency")->capture_default_str();
  cmd->add_option("--max-iters", *iters, "iteration cap")->capture_default_str();
  cmd->add_option("--tol", *tol, "log-likelihood gain per sample to stop at")
      ->capture_default_str();
  cmd->callback([=] {
    HomodyneDataset ds = io::read_quadratures(*data, *eta);
    MleOptions opts;
    opts.max_iters = *iters;
    opts.tol = *tol;
    MleResult res = mle_reconstruct(ds, *dim, opts);
    io::write_density_matrix(*out, res.rho);
    std::cout << "iterations " << res.iterations << (res.converged ? "" : " (not converged)")
              << ", log-likelihood " << res.final_log_likelihood << "\n";
  });
}

void add_wigner(CLI::App& app) {
  auto* cmd = app.add_subcommand("wigner", "Wigner function on a grid");
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--state", *state, "DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "field CSV")->required();
  grid->attach(cmd);
  cmd->callback([=] {
    io::write_field(*out, wigner(io::read_density_matrix(*state), grid->spec()));
  });
}

void add_pfunc(CLI::App& app) {
  auto* cmd = app.add_subcommand("pfunc", "regularized Glauber-Sudarshan P function");
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto L = std::make_shared<double>(5.2);
  auto tilde = std::make_shared<bool>(false);
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--state", *state, "DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "field CSV")->required();
  cmd->add_option("--L", *L, "regularization cutoff")->capture_default_str();
  cmd->add_flag("--tilde", *tilde, "emit the frequency-space P-tilde instead");
  grid->attach(cmd);
  cmd->callback([=] {
    DensityMatrix rho = io::read_density_matrix(*state);
    io::write_field(*out, *tilde ? p_tilde_from_state(rho, grid->spec())
                                 : regularized_p(rho, *L, grid->spec()));
  });
}

void add_oracle(CLI::App& app) {
  auto* cmd = app.add_subcommand("oracle", "apply the loss+phase channel to a state");
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto eta = std::make_shared<double>(0.66);
  auto phase = std::make_shared<double>(36.0);
  cmd->add_option("--state", *state, "DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "output DensityMatrix JSON")->required();
  cmd->add_option("--eta", *eta, "power transmission")->capture_default_str();
  cmd->add_option("--phase-deg", *phase, "phase shift in degrees")->capture_default_str();
  cmd->callback([=] {
    ChannelSpec spec{*eta, *phase * M_PI / 180.0};
    io::write_density_matrix(*out, eom_process(io::read_density_matrix(*state), spec));
  });
}

void add_oracle_sop(CLI::App& app) {
  auto* cmd = app.add_subcommand("oracle-sop", "exact superoperator of the loss+phase channel");
  auto out = std::make_shared<std::string>();
  auto dim = std::make_shared<int>(8);
  auto eta = std::make_shared<double>(0.66);
  auto phase = std::make_shared<double>(36.0);
  cmd->add_option("--out", *out, "output Superoperator JSON")->required();
  cmd->add_option("--dim", *dim, "Fock dimension")->capture_default_str();
  cmd->add_option("--eta", *eta, "power transmission")->capture_default_str();
  cmd->add_option("--phase-deg", *phase, "phase shift in degrees")->capture_default_str();
  cmd->callback([=] {
    ChannelSpec spec{*eta, *phase * M_PI / 180.0};
    io::write_superoperator(*out, theoretical_superoperator(spec, *dim));
  });
}

void add_fit_probes(CLI::App& app) {
  auto* cmd = app.add_subcommand("fit-probes", "displacement-centered polynomial probe fit");
  auto manifest = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto degree = std::make_shared<int>(3);
  auto mean_degree = std::make_shared<int>(2);
  auto threshold = std::make_shared<double>(0.999);
  cmd->add_option("--manifest", *manifest, "probe manifest JSON")->required();
  cmd->add_option("--out", *out, "output fit JSON")->required();
  cmd->add_option("--degree", *degree, "centered-element fit degree")->capture_default_str();
  cmd->add_option("--mean-degree", *mean_degree, "mean-amplitude fit degree")
      ->capture_default_str();
  cmd->add_option("--fidelity-threshold", *threshold,
                  "required probe-reproduction fidelity (lower it for noisy probes)")
      ->capture_default_str();
  cmd->callback([=] {
    auto probes = io::read_probe_manifest(*manifest);
    io::write_response_fit(*out, center_and_fit(probes, *degree, *mean_degree, *threshold));
  });
}

void add_reconstruct(CLI::App& app) {
  auto* cmd = app.add_subcommand("reconstruct-process",
                                 "superoperator tensor from the probe fit");
  auto fit_path = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto L = std::make_shared<double>(4.0);
  auto dim = std::make_shared<int>(8);
  auto dim_out = std::make_shared<int>(0);
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--fit", *fit_path, "fit JSON")->required();
  cmd->add_option("--out", *out, "output Superoperator JSON")->required();
  cmd->add_option("--L", *L, "regularization cutoff")->capture_default_str();
  cmd->add_option("--dim", *dim, "input Fock dimension (pairs n,m)")->capture_default_str();
  cmd->add_option("--dim-out", *dim_out, "output dimension (default: fit dim)")
      ->capture_default_str();
  grid->attach(cmd);
  cmd->callback([=] {
    InterpolatedResponse fit = io::read_response_fit(*fit_path);
    ReconstructionOptions opts;
    opts.dim_out = *dim_out;
    io::write_superoperator(*out,
                            reconstruct_superoperator(fit, *L, grid->spec(), *dim, opts));
  });
}

void add_apply(CLI::App& app) {
  auto* cmd = app.add_subcommand("apply", "apply a superoperator tensor to a state");
  auto sop_path = std::make_shared<std::string>();
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  cmd->add_option("--sop", *sop_path, "Superoperator JSON")->required();
  cmd->add_option("--state", *state, "input DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "output DensityMatrix JSON")->required();
  cmd->callback([=] {
    Superoperator sop = io::read_superoperator(*sop_path);
    DensityMatrix rho = io::read_density_matrix(*state);
    StateFixup fx;
    DensityMatrix result = apply_superoperator(sop, rho, &fx);
    io::write_density_matrix(*out, result);
    std::cout << "pre-normalization trace " << fx.pre_trace_re << ", min eigenvalue "
              << fx.min_eigenvalue << "\n";
  });
}

void add_predict_direct(CLI::App& app) {
  auto* cmd = app.add_subcommand("predict-direct",
                                 "process output via the P-function integral (no tensor)");
  auto fit_path = std::make_shared<std::string>();
  auto state = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto L = std::make_shared<double>(4.0);
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--fit", *fit_path, "fit JSON")->required();
  cmd->add_option("--state", *state, "input DensityMatrix JSON")->required();
  cmd->add_option("--out", *out, "output DensityMatrix JSON")->required();
  cmd->add_option("--L", *L, "regularization cutoff")->capture_default_str();
  grid->attach(cmd);
  cmd->callback([=] {
    InterpolatedResponse fit = io::read_response_fit(*fit_path);
    DensityMatrix rho = io::read_density_matrix(*state);
    io::write_density_matrix(*out, predict_output_direct(rho, fit, *L, grid->spec()));
  });
}

void add_calibrate(CLI::App& app) {
  auto* cmd = app.add_subcommand(
      "calibrate", "required L (or alpha_max, with --L) for Fock states up to max-n");
  auto out = std::make_shared<std::string>();
  auto max_n = std::make_shared<int>(4);
  auto target = std::make_shared<double>(0.99);
  auto L = std::make_shared<double>(0.0);
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--out", *out, "output CSV (n,value)")->required();
  cmd->add_option("--max-n", *max_n, "largest Fock index")->capture_default_str();
  cmd->add_option("--target-fidelity", *target, "round-trip fidelity target")
      ->capture_default_str();
  cmd->add_option("--L", *L,
                  "fixed cutoff: emit the alpha_max curve instead of the L curve");
  grid->attach(cmd);
  cmd->callback([=] {
    CalibrationCurve curve =
        (*L > 0.0) ? required_alpha_max_curve(*max_n, *target, *L, grid->spec())
                   : required_L_curve(*max_n, *target, grid->spec());
    io::write_calibration(*out, curve);
  });
}

void add_run_experiment(CLI::App& app) {
  auto* cmd = app.add_subcommand("run-experiment",
                                 "the full probe→tensor→prediction pipeline");
  auto config_path = std::make_shared<std::string>();
  auto workdir = std::make_shared<std::string>("experiment");
  auto cfg = std::make_shared<PipelineConfig>(PipelineConfig::paper_eom());
  auto amps = std::make_shared<std::vector<double>>();
  cmd->add_option("--config", *config_path,
                  "PipelineConfig JSON (default: the paper-eom preset)");
  cmd->add_option("--workdir", *workdir, "artifact directory")->capture_default_str();
  // every config field is overridable by a flag of the same name
  auto* o_dim = cmd->add_option("--dim", cfg->dim);
  auto* o_pdim = cmd->add_option("--probe_dim", cfg->probe_dim);
  auto* o_ext = cmd->add_option("--grid_half_extent", cfg->grid_half_extent);
  auto* o_pts = cmd->add_option("--grid_points", cfg->grid_points);
  auto* o_l = cmd->add_option("--L", cfg->L);
  cmd->add_option("--probe_amplitudes", *amps)->delimiter(',');
  auto* o_spp = cmd->add_option("--samples_per_probe", cfg->samples_per_probe);
  auto* o_ppp = cmd->add_option("--phases_per_probe", cfg->phases_per_probe);
  auto* o_seed = cmd->add_option("--seed", cfg->seed);
  auto* o_eta = cmd->add_option("--eta", cfg->eta);
  auto* o_phase = cmd->add_option("--phase_deg", cfg->phase_deg);
  auto* o_deg = cmd->add_option("--fit_degree", cfg->fit_degree);
  auto* o_mdeg = cmd->add_option("--mean_fit_degree", cfg->mean_fit_degree);
  auto* o_fft = cmd->add_option("--fit_fidelity_threshold", cfg->fit_fidelity_threshold);
  auto* o_iters = cmd->add_option("--mle_max_iters", cfg->mle_max_iters);
  auto* o_tol = cmd->add_option("--mle_tol", cfg->mle_tol);
  auto* o_eff = cmd->add_option("--mle_efficiency", cfg->mle_efficiency);
  auto* o_nl = cmd->add_flag("--noiseless", cfg->noiseless);
  auto* o_vmin = cmd->add_option("--squeezed_var_min", cfg->squeezed_var_min);
  auto* o_vmax = cmd->add_option("--squeezed_var_max", cfg->squeezed_var_max);
  auto* o_th = cmd->add_option("--squeezed_theta", cfg->squeezed_theta);
  cmd->callback([=] {
    PipelineConfig config = *cfg;
    if (!config_path->empty()) {
      // file provides the base, explicit flags still win
      PipelineConfig merged = load_pipeline_config(*config_path);
      if (o_dim->count()) merged.dim = cfg->dim;
      if (o_pdim->count()) merged.probe_dim = cfg->probe_dim;
      if (o_ext->count()) merged.grid_half_extent = cfg->grid_half_extent;
      if (o_pts->count()) merged.grid_points = cfg->grid_points;
      if (o_l->count()) merged.L = cfg->L;
      if (o_spp->count()) merged.samples_per_probe = cfg->samples_per_probe;
      if (o_ppp->count()) merged.phases_per_probe = cfg->phases_per_probe;
      if (o_seed->count()) merged.seed = cfg->seed;
      if (o_eta->count()) merged.eta = cfg->eta;
      if (o_phase->count()) merged.phase_deg = cfg->phase_deg;
      if (o_deg->count()) merged.fit_degree = cfg->fit_degree;
      if (o_mdeg->count()) merged.mean_fit_degree = cfg->mean_fit_degree;
      if (o_fft->count()) merged.fit_fidelity_threshold = cfg->fit_fidelity_threshold;
      if (o_iters->count()) merged.mle_max_iters = cfg->mle_max_iters;
      if (o_tol->count()) merged.mle_tol = cfg->mle_tol;
      if (o_eff->count()) merged.mle_efficiency = cfg->mle_efficiency;
      if (o_nl->count()) merged.noiseless = cfg->noiseless;
      if (o_vmin->count()) merged.squeezed_var_min = cfg->squeezed_var_min;
      if (o_vmax->count()) merged.squeezed_var_max = cfg->squeezed_var_max;
      if (o_th->count()) merged.squeezed_theta = cfg->squeezed_theta;
      config = merged;
    }
    if (!amps->empty()) config.probe_amplitudes = *amps;
    ExperimentSummary s = run_experiment(config, *workdir);
    std::cout << "fidelity (tensor route) " << s.fidelity_tensor_vs_oracle
              << ", (direct route) " << s.fidelity_direct_vs_oracle
              << "\npredicted quadrature extrema " << s.predicted_db_max << " dB / "
              << s.predicted_db_min << " dB (oracle " << s.oracle_db_max << " / "
              << s.oracle_db_min << ")\nsummary written to " << *workdir
              << "/summary.json\n";
  });
}

void add_validate(CLI::App& app) {
  auto* cmd = app.add_subcommand("validate", "schema + invariant check of an artifact file");
  auto file = std::make_shared<std::string>();
  auto kind = std::make_shared<std::string>();
  cmd->add_option("--file", *file, "path to check")->required();
  cmd->add_option("--kind", *kind,
                  "density-matrix | superoperator | quadratures | probe-manifest | "
                  "response-fit | field | calibration | config")
      ->required();
  cmd->callback([=] {
    ValidationReport rep = validate_file(*file, file_kind_from_string(*kind));
    if (rep.ok) {
      std::cout << "ok: " << *file << " is a valid " << *kind << "\n";
    } else {
      for (const auto& d : rep.diagnostics) std::cerr << *file << ": " << d << "\n";
      throw ValidationError("validation failed");
    }
  });
}

void add_plot_export(CLI::App& app) {
  auto* cmd = app.add_subcommand("plot-export", "CSV exports behind the figures");
  auto in = std::make_shared<std::string>();
  auto out = std::make_shared<std::string>();
  auto kind = std::make_shared<std::string>();
  auto L = std::make_shared<double>(5.2);
  auto grid = std::make_shared<GridFlags>();
  cmd->add_option("--in", *in, "artifact path")->required();
  cmd->add_option("--out", *out, "output CSV")->required();
  cmd->add_option("--kind", *kind, "wigner | pfunc | sop-diagonal | calibration")->required();
  cmd->add_option("--L", *L, "regularization cutoff (pfunc)")->capture_default_str();
  grid->attach(cmd);
  cmd->callback([=] {
    PlotOptions opts;
    opts.grid = grid->spec();
    opts.L = *L;
    plot_export(*in, plot_kind_from_string(*kind), *out, opts);
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"coherent-state quantum process tomography toolkit"};
  app.require_subcommand(1);
  add_sample(app);
  add_mle(app);
  add_wigner(app);
  add_pfunc(app);
  add_oracle(app);
  add_oracle_sop(app);
  add_fit_probes(app);
  add_reconstruct(app);
  add_apply(app);
  add_predict_direct(app);
  add_calibrate(app);
  add_run_experiment(app);
  add_validate(app);
  add_plot_export(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help and friends
    app.exit(e);
    return 1;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalContractError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
