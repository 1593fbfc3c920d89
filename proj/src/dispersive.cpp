#include "usc/dispersive.hpp"

#include "usc/error.hpp"

#include <cmath>
#include <numbers>

namespace usc {

double analytic_vev(std::span<const QubitSpec> qubits, double omega_c) {
  if (!(omega_c > 0.0)) throw InvalidSpec("omega_c must be > 0");
  double sum = 0.0;
  for (const auto& q : qubits) sum += q.g * q.sin_theta();
  return 2.0 * sum / omega_c;
}

ProbeEffective probe_effective(const ProbeSpec& probe, double v) {
  if (!(probe.gap_delta_prime > 0.0)) throw InvalidSpec("probe gap must be > 0");
  ProbeEffective out;
  out.v_used = v;
  const double mixing = 2.0 * probe.g_prime * v;
  out.omega_q_prime = std::hypot(probe.gap_delta_prime, mixing);
  out.alpha = std::asin(mixing / out.omega_q_prime);
  return out;
}

TwoPhotonLine two_photon_rate_coefficient(const ProbeEffective& probe, double amplitude) {
  if (amplitude < 0.0) throw InvalidSpec("drive amplitude must be >= 0");
  TwoPhotonLine line;
  line.resonance = 0.5 * probe.omega_q_prime;
  const double s = std::sin(2.0 * probe.alpha);
  line.weight = std::numbers::pi * amplitude * amplitude * s * s /
                (probe.omega_q_prime * probe.omega_q_prime);
  return line;
}

}  // namespace usc
