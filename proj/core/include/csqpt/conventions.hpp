#pragma once

#include <complex>

// Single authoritative record of the phase-space conventions used by every
// module. No other file may redefine these.
//
//   [x̂, p̂] = i                      x̂ = (â + â†)/√2,  p̂ = (â − â†)/(i√2)
//   vacuum quadrature variance 1/2
//   (x, p) = (√2·Re α, √2·Im α)      coherent amplitude ↔ phase-space point
//   U(φ)|n⟩ = e^{inφ}|n⟩             optical phase shift
//   x̂_θ = x̂ cos θ + p̂ sin θ          eigenkets ⟨n|x_θ⟩ = e^{inθ} ψ_n(x)
//
// P functions are handled as densities over the (x, p) plane, so that
// d²α = dx dp / 2 absorbs the factor 2 of the coherent-state decomposition
// ρ̂ = 2∫P(α)|α⟩⟨α|d²α once and for all:  ρ̂ = ∬ P(x,p) |α(x,p)⟩⟨α(x,p)| dx dp.
//
// Fourier convention for phase-space fields:
//   F(k) = ∬ f(x,p) e^{−i(k_x x + k_p p)} dx dp,   f = (2π)^{−2} ∬ F e^{+i k·r} dk.
// With it, P̃ = W̃ · exp((k_x²+k_p²)/4) holds exactly (the vacuum gives P̃ ≡ 1).

namespace csqpt {

using Complex = std::complex<double>;
using Amplitude = std::complex<double>;  // coherent amplitude α

inline constexpr double kVacuumVariance = 0.5;

// (x,p) ↔ α dictionary.
inline double x_of(Amplitude alpha) { return std::sqrt(2.0) * alpha.real(); }
inline double p_of(Amplitude alpha) { return std::sqrt(2.0) * alpha.imag(); }
inline Amplitude alpha_of(double x, double p) {
  return Amplitude(x, p) / std::sqrt(2.0);
}

// Decibels relative to vacuum noise: 0 dB ↔ variance 1/2.
inline double variance_to_db(double v) { return 10.0 * std::log10(v / kVacuumVariance); }
inline double db_to_variance(double db) { return kVacuumVariance * std::pow(10.0, db / 10.0); }

// Numerical contract tolerances shared across modules.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kTraceTol = 1e-9;
inline constexpr double kPsdTol = 1e-9;
inline constexpr double kTruncationTol = 1e-6;

}  // namespace csqpt
