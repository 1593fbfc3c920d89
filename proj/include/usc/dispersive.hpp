#pragma once

// Closed-form results valid in the dispersive regime. They serve as
// independent oracles for the numerics.

#include "usc/model.hpp"

#include <span>

namespace usc {

// Displaced-oscillator estimate of the vacuum expectation value,
// 2 sum_j g_j sin(theta_j) / omega_c. Meaningful only at positive detuning
// omega_q^(j) > omega_c with every qubit close to its ground state.
double analytic_vev(std::span<const QubitSpec> qubits, double omega_c);

// The probe in the mean field g' v of the resonator:
//   H' = Delta' sigma_z / 2 + g' v sigma_x,
// rotated by the mixing angle alpha with sin(alpha) = 2 g' v / omega_q'.
struct ProbeEffective {
  double omega_q_prime = 0.0;
  double alpha = 0.0;
  double v_used = 0.0;
};

ProbeEffective probe_effective(const ProbeSpec& probe, double v);

// Second-order two-photon absorption g' -> e' under E(t) = E0 sin(omega t):
// rate = weight * delta(2 omega - omega_q') with
//   weight = pi E0^2 sin^2(2 alpha) / omega_q'^2.
struct TwoPhotonLine {
  double resonance = 0.0;  // drive frequency omega_q' / 2
  double weight = 0.0;
};

TwoPhotonLine two_photon_rate_coefficient(const ProbeEffective& probe, double amplitude);

}  // namespace usc
