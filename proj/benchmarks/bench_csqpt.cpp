#include <benchmark/benchmark.h>

#include "csqpt/fock.hpp"
#include "csqpt/mle.hpp"
#include "csqpt/oracles.hpp"
#include "csqpt/phasespace.hpp"
#include "csqpt/proctensor.hpp"

using namespace csqpt;

namespace {

const GridSpec kGrid(10.0, 256);

void BM_wigner(benchmark::State& state) {
  DensityMatrix rho = squeezed_thermal_state(0.3473, 0.9772, 0.0, 14);
  for (auto _ : state) benchmark::DoNotOptimize(wigner(rho, kGrid));
}
BENCHMARK(BM_wigner)->Unit(benchmark::kMillisecond);

void BM_regularized_p(benchmark::State& state) {
  DensityMatrix rho = squeezed_thermal_state(0.3473, 0.9772, 0.0, 14);
  for (auto _ : state) benchmark::DoNotOptimize(regularized_p(rho, 4.0, kGrid));
}
BENCHMARK(BM_regularized_p)->Unit(benchmark::kMillisecond);

void BM_state_from_p(benchmark::State& state) {
  PhaseSpaceField field = regularized_p(squeezed_thermal_state(0.3473, 0.9772, 0.0, 14),
                                        4.0, kGrid);
  for (auto _ : state) benchmark::DoNotOptimize(state_from_p(field, 14));
}
BENCHMARK(BM_state_from_p)->Unit(benchmark::kMillisecond);

void BM_mle_iteration(benchmark::State& state) {
  std::vector<double> phases(12);
  for (int k = 0; k < 12; ++k) phases[k] = M_PI * k / 12;
  DensityMatrix st = squeezed_thermal_state(0.3473, 0.9772, 0.0, 14);
  HomodyneDataset data = sample_quadratures(st, phases, 4167, 1);
  MleOptions opts;
  opts.max_iters = 10;
  opts.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(mle_reconstruct(data, 14, opts));
}
BENCHMARK(BM_mle_iteration)->Unit(benchmark::kMillisecond);

void BM_fidelity(benchmark::State& state) {
  DensityMatrix a = squeezed_thermal_state(0.3473, 0.9772, 0.0, 32);
  DensityMatrix b = loss_channel(a, 0.9);
  for (auto _ : state) benchmark::DoNotOptimize(fidelity(a, b));
}
BENCHMARK(BM_fidelity)->Unit(benchmark::kMicrosecond);

void BM_reconstruct_superoperator(benchmark::State& state) {
  std::vector<ProbeRecord> probes;
  for (int i = 0; i < 9; ++i) {
    const double a = 3.5 * i / 8.0;
    probes.push_back({Amplitude(a, 0), coherent_state(Amplitude(a, 0), 34)});
  }
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);
  ReconstructionOptions opts;
  opts.dim_out = 3;
  opts.mass_coverage_warn = 0.0;
  for (auto _ : state)
    benchmark::DoNotOptimize(reconstruct_superoperator(fit, 3.6, kGrid, 3, opts));
}
BENCHMARK(BM_reconstruct_superoperator)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
