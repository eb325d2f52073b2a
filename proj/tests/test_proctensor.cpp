#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "csqpt/errors.hpp"
#include "csqpt/fock.hpp"
#include "csqpt/oracles.hpp"
#include "csqpt/proctensor.hpp"
#include "test_support.hpp"

using namespace csqpt;
using csqpt::testing::binomial_diag;
using csqpt::testing::random_state;

namespace {

const GridSpec kGrid(10.0, 256);

std::vector<ProbeRecord> channel_probes(const ChannelSpec& spec, double amax, int count,
                                        int dim) {
  std::vector<ProbeRecord> probes;
  for (int i = 0; i < count; ++i) {
    const double a = amax * i / (count - 1);
    probes.push_back(
        {Amplitude(a, 0), eom_process(coherent_state(Amplitude(a, 0), dim), spec)});
  }
  return probes;
}

}  // namespace

TEST_CASE("center_and_fit through the identity channel") {
  auto probes = channel_probes({1.0, 0.0}, 3.0, 8, csqpt::testing::coherent_dim_for(3.0));
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);
  // ⟨â⟩(a) = a: linear coefficients [0, 1, 0]
  CHECK(std::abs(fit.mean_fit[0]) < 1e-6);
  CHECK(std::abs(fit.mean_fit[1] - Complex(1, 0)) < 1e-5);
  CHECK(std::abs(fit.mean_fit[2]) < 1e-5);
  // centered responses are the vacuum at every amplitude
  for (double a : {0.0, 1.3, 2.9}) {
    CMat c = fit.centered_at(a);
    CHECK(std::abs(c(0, 0) - Complex(1, 0)) < 1e-6);
    CHECK(c.cwiseAbs().sum() - std::abs(c(0, 0)) < 2e-3);
  }
  CHECK(fit.min_probe_fidelity >= 0.999);
}

TEST_CASE("center_and_fit through loss+phase") {
  const ChannelSpec spec{0.66, 0.9};
  auto probes = channel_probes(spec, 2.5, 9, csqpt::testing::coherent_dim_for(2.5));
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);
  // ⟨â⟩(a) = sqrt(eta) e^{i phi} a
  const Complex slope = std::polar(std::sqrt(0.66), 0.9);
  CHECK(std::abs(fit.mean_fit[1] - slope) < 1e-5);
  CHECK(std::abs(fit.mean_at(2.0) - 2.0 * slope) < 1e-5);
  for (double a : {0.5, 2.0}) {
    CMat c = fit.centered_at(a);
    CHECK(std::abs(c(0, 0) - Complex(1, 0)) < 1e-5);
  }
}

TEST_CASE("center_and_fit input validation") {
  auto probes = channel_probes({1.0, 0.0}, 2.0, 8, csqpt::testing::coherent_dim_for(2.0));
  SUBCASE("too few probes for the degree") {
    std::vector<ProbeRecord> two(probes.begin(), probes.begin() + 2);
    CHECK_THROWS_AS(center_and_fit(two, 3), ValidationError);
  }
  SUBCASE("complex amplitudes are rejected in v1") {
    probes[2].alpha = Amplitude(0.5, 0.5);
    CHECK_THROWS_AS(center_and_fit(probes, 3), ValidationError);
  }
  SUBCASE("duplicate amplitudes are rejected") {
    probes[3].alpha = probes[2].alpha;
    CHECK_THROWS_AS(center_and_fit(probes, 3), ValidationError);
  }
  SUBCASE("mixed dims are rejected") {
    probes[1] = ProbeRecord{probes[1].alpha, fock_state(0, 7)};
    CHECK_THROWS_AS(center_and_fit(probes, 3), ValidationError);
  }
  SUBCASE("irreconcilable probes fail the fidelity threshold with an element") {
    // alternate two different channels so no smooth fit can reproduce both
    for (size_t i = 0; i < probes.size(); i += 2) {
      const double a = probes[i].alpha.real();
      probes[i] = {probes[i].alpha,
                   eom_process(coherent_state(Amplitude(a, 0), csqpt::testing::coherent_dim_for(2.0)), {0.4, 0.0})};
    }
    CHECK_THROWS_WITH_AS(center_and_fit(probes, 1, 1),
                         doctest::Contains("worst element"), NumericalContractError);
  }
}

TEST_CASE("response_at") {
  const ChannelSpec spec{0.66, 36.0 * M_PI / 180.0};
  auto probes = channel_probes(spec, 2.5, 9, csqpt::testing::coherent_dim_for(2.5));
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);

  SUBCASE("reproduces the probes") {
    for (const auto& probe : probes)
      CHECK(fidelity(response_at(fit, probe.alpha), probe.output) >= 0.999);
  }
  SUBCASE("phase symmetry covers imaginary amplitudes") {
    const Amplitude alpha(0.0, 1.2);
    DensityMatrix predicted = response_at(fit, alpha);
    DensityMatrix oracle = eom_process(coherent_state(alpha, csqpt::testing::coherent_dim_for(2.5)), spec);
    CHECK(fidelity(predicted, oracle) >= 0.999);
  }
  SUBCASE("alpha = 0 is the vacuum response") {
    DensityMatrix r0 = response_at(fit, Amplitude(0, 0));
    CHECK(fidelity(r0, eom_process(fock_state(0, csqpt::testing::coherent_dim_for(2.5)), spec)) >= 0.999);
  }
  SUBCASE("extrapolation is refused") {
    CHECK_THROWS_AS(response_at(fit, Amplitude(3.1, 0)), ValidationError);
  }
}

TEST_CASE("identity-channel reconstruction at dim_in 3") {
  auto probes = channel_probes({1.0, 0.0}, 3.5, 9, csqpt::testing::coherent_dim_for(3.5));
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);
  ReconstructionOptions opts;
  opts.dim_out = 3;
  Superoperator sop = reconstruct_superoperator(fit, 3.6, kGrid, 3, opts);

  SUBCASE("tensor is near the identity") {
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 3; ++n)
          for (int m = 0; m < 3; ++m) {
            const Complex expect = (l == n && k == m) ? 1.0 : 0.0;
            CHECK(std::abs(sop.at(l, k, n, m) - expect) < 0.02);
          }
    CHECK(trace_preservation_defect(sop) < 0.02);
    CHECK(choi_min_eigenvalue(sop) > -0.05);
  }
  SUBCASE("noiseless removed mass stays under the invariant bound") {
    CHECK(sop.removed_mass_ratio < 0.05);
  }
  SUBCASE("hermiticity-preservation pairing") {
    double worst = 0.0;
    for (int l = 0; l < 3; ++l)
      for (int k = 0; k < 3; ++k)
        for (int n = 0; n < 3; ++n)
          for (int m = 0; m < 3; ++m)
            worst = std::max(worst,
                             std::abs(sop.at(l, k, n, m) - std::conj(sop.at(k, l, m, n))));
    CHECK(worst < 1e-8);
  }
  SUBCASE("phase-symmetry covariance is exact after enforcement") {
    for (std::uint64_t seed : {1u, 2u}) {
      DensityMatrix rho = random_state(3, seed);
      const double phi = 0.4 + 0.3 * seed;
      DensityMatrix a = apply_superoperator(sop, phase_shift(rho, phi));
      DensityMatrix b = phase_shift(apply_superoperator(sop, rho), phi);
      CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-6);
    }
  }
  SUBCASE("route equivalence against the direct integral") {
    for (std::uint64_t seed : {3u, 4u, 5u}) {
      DensityMatrix rho = random_state(3, seed);
      DensityMatrix via_tensor = apply_superoperator(sop, rho);
      DensityMatrix direct = predict_output_direct(rho, fit, 3.6, kGrid);
      DensityMatrix direct_cut =
          DensityMatrix::from_reconstruction(direct.matrix().topLeftCorner(3, 3));
      CHECK(fidelity(via_tensor, direct_cut, 0.05) >= 0.999);
    }
  }
}

TEST_CASE("loss+phase reconstruction matches the analytic tensor") {
  const ChannelSpec spec{0.66, 36.0 * M_PI / 180.0};
  auto probes = channel_probes(spec, 3.5, 9, csqpt::testing::coherent_dim_for(3.5));
  InterpolatedResponse fit = center_and_fit(probes, 3, 2);
  ReconstructionOptions opts;
  opts.dim_out = 3;
  Superoperator sop = reconstruct_superoperator(fit, 3.6, kGrid, 3, opts);
  for (int m = 0; m < 3; ++m)
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(sop.at(k, k, m, m) - Complex(binomial_diag(m, k, 0.66), 0)) < 0.02);
  CHECK(std::abs(sop.at(1, 0, 1, 0) - std::polar(std::sqrt(0.66), spec.phase)) < 0.02);
}

TEST_CASE("apply_superoperator") {
  Superoperator id = theoretical_superoperator({1.0, 0.0}, 5);
  DensityMatrix rho = random_state(5, 17);
  SUBCASE("identity tensor returns the input exactly") {
    DensityMatrix out = apply_superoperator(id, rho);
    CHECK((out.matrix() - rho.matrix()).cwiseAbs().maxCoeff() < 1e-13);
  }
  SUBCASE("linear in the input") {
    Superoperator sop = theoretical_superoperator({0.7, 0.5}, 5);
    DensityMatrix a = random_state(5, 21), b = random_state(5, 22);
    const double t = 0.3;
    CMat mixed = apply_superoperator_raw(sop, t * a.matrix() + (1 - t) * b.matrix());
    CMat parts = t * apply_superoperator_raw(sop, a.matrix()) +
                 (1 - t) * apply_superoperator_raw(sop, b.matrix());
    CHECK((mixed - parts).cwiseAbs().maxCoeff() < 1e-10);
  }
  SUBCASE("hermitian input stays hermitian before the final fixup") {
    Superoperator sop = theoretical_superoperator({0.7, 0.5}, 5);
    CMat raw = apply_superoperator_raw(sop, rho.matrix());
    CHECK((raw - raw.adjoint().eval()).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(apply_superoperator(id, random_state(4, 1)), ValidationError);
  }
  SUBCASE("the reconstructed-style mixture statement for a single photon") {
    Superoperator sop = theoretical_superoperator({0.66, 0.2}, 5);
    DensityMatrix out = apply_superoperator(sop, fock_state(1, 5));
    CHECK(out.entry(0, 0).real() == doctest::Approx(0.34).epsilon(1e-10));
    CHECK(out.entry(1, 1).real() == doctest::Approx(0.66).epsilon(1e-10));
  }
}

TEST_CASE("choi diagnostics") {
  CHECK(std::abs(choi_min_eigenvalue(theoretical_superoperator({1.0, 0.0}, 4))) < 1e-12);
  CHECK(choi_min_eigenvalue(theoretical_superoperator({0.5, 1.0}, 6)) >= -1e-12);
  CHECK(trace_preservation_defect(theoretical_superoperator({1.0, 0.0}, 4)) < 1e-14);
}
