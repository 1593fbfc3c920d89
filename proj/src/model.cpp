#include "usc/model.hpp"

#include "usc/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace usc {

QubitSpec QubitSpec::from_frequency_angle(double omega_q, double theta, double g) {
  QubitSpec q;
  q.gap_delta = omega_q * std::cos(theta);
  q.flux_offset_energy = omega_q * std::sin(theta);
  q.g = g;
  return q;
}

double QubitSpec::omega_q() const { return std::hypot(gap_delta, flux_offset_energy); }
double QubitSpec::cos_theta() const { return gap_delta / omega_q(); }
double QubitSpec::sin_theta() const { return flux_offset_energy / omega_q(); }
double QubitSpec::theta() const { return std::atan2(flux_offset_energy, gap_delta); }

double LossSpec::qubit_rate(int qubit) const {
  return qubit < static_cast<int>(gamma_q.size()) ? gamma_q[qubit] : 0.0;
}

double LossSpec::min_positive_rate() const {
  double best = std::numeric_limits<double>::infinity();
  auto consider = [&](double r) {
    if (r > 0.0) best = std::min(best, r);
  };
  consider(gamma_c);
  for (double r : gamma_q) consider(r);
  consider(gamma_probe);
  return std::isfinite(best) ? best : 0.0;
}

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidSpec(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SystemSpec::validate() const {
  require(finite(resonator.omega_c) && resonator.omega_c > 0.0, "resonator.omega_c must be > 0");
  require(resonator.fock_cutoff >= 2, "fock cutoff must be >= 2");
  for (std::size_t j = 0; j < qubits.size(); ++j) {
    const auto& q = qubits[j];
    const std::string tag = "qubit " + std::to_string(j) + ": ";
    require(finite(q.gap_delta) && finite(q.flux_offset_energy) && finite(q.g),
            tag + "non-finite parameter");
    require(q.omega_q() > 0.0, tag + "transition frequency must be > 0");
  }
  if (probe) {
    require(finite(probe->gap_delta_prime) && probe->gap_delta_prime > 0.0,
            "probe gap must be > 0");
    require(finite(probe->g_prime), "probe coupling must be finite");
  }
  if (drive) {
    require(probe.has_value(), "a drive requires a probe qubit");
    require(finite(drive->amplitude) && drive->amplitude >= 0.0, "drive amplitude must be >= 0");
    require(finite(drive->frequency) && drive->frequency >= 0.0, "drive frequency must be >= 0");
  }
  if (modulation) {
    const auto& m = *modulation;
    require(finite(m.g0) && finite(m.g1) && finite(m.frequency), "modulation: non-finite parameter");
    require(!(m.g0 == 0.0 && m.g1 != 0.0), "modulation g0 = 0 with g1 != 0 has undefined scaling");
    require(m.g1 >= 0.0 && m.g0 >= m.g1, "modulation requires g0 >= g1 >= 0");
    require(m.frequency >= 0.0, "modulation frequency must be >= 0");
  }
  require(finite(losses.gamma_c) && losses.gamma_c >= 0.0, "losses.gamma_c must be >= 0");
  require(finite(losses.gamma_probe) && losses.gamma_probe >= 0.0,
          "losses.gamma_probe must be >= 0");
  require(losses.gamma_q.size() <= qubits.size(), "more qubit loss rates than qubits");
  for (double r : losses.gamma_q) require(finite(r) && r >= 0.0, "qubit loss rates must be >= 0");
  require(numerics.dt >= 0.0 && numerics.transient >= 0.0 && numerics.window > 0.0 &&
              numerics.levels >= 0 && numerics.level_window >= 0.0,
          "numerics knobs must be non-negative (window > 0)");
}

SpaceLayout SystemSpec::layout() const {
  return SpaceLayout(resonator.fock_cutoff, static_cast<int>(qubits.size()), probe.has_value());
}

SystemSpec SystemSpec::usc_only() const {
  SystemSpec s;
  s.resonator = resonator;
  s.qubits = qubits;
  s.numerics = numerics;
  return s;
}

SystemSpec SystemSpec::equal_qubits(int n, double omega_q, double theta, double g,
                                    int fock_cutoff) {
  SystemSpec s;
  s.resonator.fock_cutoff = fock_cutoff;
  s.qubits.assign(n, QubitSpec::from_frequency_angle(omega_q, theta, g));
  return s;
}

Operator usc_coupling_hamiltonian(const SystemSpec& spec) {
  const SpaceLayout layout = spec.layout();
  const Operator x = quadrature(layout);
  Operator h = Operator::Zero(layout.total_dim(), layout.total_dim());
  for (int j = 0; j < static_cast<int>(spec.qubits.size()); ++j) {
    const auto& q = spec.qubits[j];
    if (q.g == 0.0) continue;
    const Operator dipole = q.cos_theta() * pauli(layout, j, PauliAxis::x) +
                            q.sin_theta() * pauli(layout, j, PauliAxis::z);
    h += q.g * x * dipole;
  }
  return h;
}

Operator build_static_hamiltonian(const SystemSpec& spec) {
  spec.validate();
  const SpaceLayout layout = spec.layout();
  const double wc = spec.resonator.omega_c;

  Operator h = wc * number(layout);
  h.diagonal().array() += 0.5 * wc;
  for (int j = 0; j < static_cast<int>(spec.qubits.size()); ++j) {
    h += 0.5 * spec.qubits[j].omega_q() * pauli(layout, j, PauliAxis::z);
  }
  h += usc_coupling_hamiltonian(spec);
  if (spec.probe) {
    const int p = layout.probe_index();
    h += 0.5 * spec.probe->gap_delta_prime * pauli(layout, p, PauliAxis::z);
    if (spec.probe->g_prime != 0.0) {
      h += spec.probe->g_prime * quadrature(layout) * pauli(layout, p, PauliAxis::x);
    }
  }
  return h;
}

Operator drive_operator(const SystemSpec& spec) {
  const SpaceLayout layout = spec.layout();
  return pauli(layout, layout.probe_index(), PauliAxis::x);
}

double modulation_factor(const SystemSpec& spec, double t) {
  if (!spec.modulation || spec.modulation->g1 == 0.0) return 0.0;
  const auto& m = *spec.modulation;
  if (m.g0 == 0.0) throw InvalidSpec("modulation g0 = 0 with g1 != 0 has undefined scaling");
  return (m.g1 / m.g0) * std::sin(m.frequency * t);
}

double drive_field(const SystemSpec& spec, double t) {
  if (!spec.drive) return 0.0;
  return spec.drive->amplitude * std::sin(spec.drive->frequency * t);
}

Operator hamiltonian_at(const SystemSpec& spec, double t) {
  Operator h = build_static_hamiltonian(spec);
  const double f = modulation_factor(spec, t);
  if (f != 0.0) h += f * usc_coupling_hamiltonian(spec);
  const double e = drive_field(spec, t);
  if (e != 0.0) h += e * drive_operator(spec);
  return h;
}

double max_drive_frequency(const SystemSpec& spec) {
  double w = 0.0;
  if (spec.drive) w = std::max(w, spec.drive->frequency);
  if (spec.modulation) w = std::max(w, spec.modulation->frequency);
  return w;
}

}  // namespace usc
