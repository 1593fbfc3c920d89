#pragma once

// Physical description of the circuit and Hamiltonian assembly.
//
// Units: hbar = 1 and every frequency/energy is expressed in units of the
// resonator frequency the caller chooses (omega_c = 1 in all built-in
// scenarios). Times are in units of 1/omega_c.

#include "usc/hilbert.hpp"

#include <optional>
#include <vector>

namespace usc {

struct ResonatorSpec {
  double omega_c = 1.0;
  int fock_cutoff = 20;

  bool operator==(const ResonatorSpec&) const = default;
};

// A flux qubit in its eigenbasis. gap_delta is the tunnelling gap Delta,
// flux_offset_energy is 2 I_p f. The transition frequency and mixing angle
// follow as omega_q = sqrt(Delta^2 + eps^2), cos(theta) = Delta / omega_q.
struct QubitSpec {
  double gap_delta = 1.0;
  double flux_offset_energy = 0.0;
  double g = 0.0;

  static QubitSpec from_frequency_angle(double omega_q, double theta, double g);

  double omega_q() const;
  double cos_theta() const;
  double sin_theta() const;
  double theta() const;

  bool operator==(const QubitSpec&) const = default;
};

// Probe qubit with an even potential: sigma_x coupling only.
struct ProbeSpec {
  double gap_delta_prime = 0.4;
  double g_prime = 0.0;

  bool operator==(const ProbeSpec&) const = default;
};

struct DriveSpec {
  double amplitude = 0.0;
  double frequency = 0.0;

  bool operator==(const DriveSpec&) const = default;
};

// g(t) = g0 + g1 sin(omega t), applied multiplicatively to every USC qubit
// coupling (the probe coupling stays fixed).
struct ModulationSpec {
  double g0 = 0.0;
  double g1 = 0.0;
  double frequency = 0.0;

  bool operator==(const ModulationSpec&) const = default;
};

struct LossSpec {
  double gamma_c = 0.0;
  std::vector<double> gamma_q;  // one per USC qubit; missing entries read as 0
  double gamma_probe = 0.0;

  double qubit_rate(int qubit) const;
  double min_positive_rate() const;  // 0 when every rate is 0

  bool operator==(const LossSpec&) const = default;
};

// Integration and truncation knobs. Zero means "choose automatically".
struct NumericsSpec {
  double dt = 0.0;           // upper bound on the integrator step
  double transient = 0.0;    // discarded time before averaging; auto = 10 / gamma_min
  double window = 20.0;      // averaging window in drive periods
  int levels = 0;            // dressed levels kept in the dynamics
  double level_window = 0.0; // energy window above the ground state; auto = omega_max + omega_c

  bool operator==(const NumericsSpec&) const = default;
};

struct SystemSpec {
  ResonatorSpec resonator;
  std::vector<QubitSpec> qubits;
  std::optional<ProbeSpec> probe;
  std::optional<DriveSpec> drive;
  std::optional<ModulationSpec> modulation;
  LossSpec losses;
  NumericsSpec numerics;

  // Throws InvalidSpec on any violated invariant.
  void validate() const;
  SpaceLayout layout() const;

  // Copy with probe, drive and losses removed: the bare USC system.
  SystemSpec usc_only() const;

  // Equal-qubit constructor used by the built-in scenarios.
  static SystemSpec equal_qubits(int n, double omega_q, double theta, double g, int fock_cutoff);

  bool operator==(const SystemSpec&) const = default;
};

// Time-independent Hamiltonian (drive and modulation ignored), including the
// zero-point term omega_c / 2.
Operator build_static_hamiltonian(const SystemSpec& spec);

// sum_j g_j X (cos theta_j sigma_x^(j) + sin theta_j sigma_z^(j)); the part
// scaled by the coupling modulation.
Operator usc_coupling_hamiltonian(const SystemSpec& spec);

// Operator multiplied by the drive field E(t); sigma_x of the probe.
Operator drive_operator(const SystemSpec& spec);

// (g(t) - g0) / g0, i.e. the fractional coupling change; 0 without modulation.
double modulation_factor(const SystemSpec& spec, double t);
// E0 sin(omega t); 0 without drive.
double drive_field(const SystemSpec& spec, double t);

Operator hamiltonian_at(const SystemSpec& spec, double t);

// Largest frequency among drive and modulation (0 if neither is present).
double max_drive_frequency(const SystemSpec& spec);

}  // namespace usc
