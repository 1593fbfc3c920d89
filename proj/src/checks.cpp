#include "usc/checks.hpp"

#include "usc/dispersive.hpp"
#include "usc/error.hpp"
#include "usc/observables.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

namespace usc {

namespace {

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

CheckOutcome dispersive_vev(int cutoff) {
  CheckOutcome c{"dispersive_vev", true, {}};
  double worst = 0.0;
  for (double g : {0.02, 0.05}) {
    for (double theta : {std::numbers::pi / 6, std::numbers::pi / 3}) {
      for (double delta : {0.5, 1.0}) {
        const SystemSpec s = SystemSpec::equal_qubits(2, 1.0 + delta, theta, g, cutoff);
        const double exact = ground_vev(s);
        const double analytic = analytic_vev(s.qubits, s.resonator.omega_c);
        worst = std::max(worst, std::abs(exact - analytic) / std::abs(analytic));
      }
    }
  }
  c.passed = worst < 0.05;
  c.detail = "max relative deviation " + sci(worst) + " (limit 5e-2)";
  return c;
}

CheckOutcome parity_zero(int cutoff) {
  CheckOutcome c{"parity_vev_zero", true, {}};
  double worst = 0.0;
  for (double g : {0.0, 0.1, 0.3}) {
    worst = std::max(worst, std::abs(ground_vev(SystemSpec::equal_qubits(1, 1.7, 0.0, g, cutoff))));
  }
  c.passed = worst < 1e-10;
  c.detail = "max |v| at theta = 0: " + sci(worst);
  return c;
}

CheckOutcome ground_emission(int cutoff) {
  CheckOutcome c{"ground_state_emission", true, {}};
  const SystemSpec s = SystemSpec::equal_qubits(1, 1.7, std::numbers::pi / 4, 0.4, cutoff);
  const EigenSystem es = diagonalize_spec(s);
  const DressedOperator x = dressed_decompose(quadrature(s.layout()), es);
  const double leak = x.plus.col(0).norm();
  const DensityMatrix g = DensityMatrix::pure_level(es.dim(), 0);
  const double flux = emission_rate(g, x).total;
  const double bare = ground_photon_number(s);
  c.passed = leak < 1e-12 && flux < 1e-12 && bare > 1e-3;
  c.detail = "|X+ G| = " + sci(leak) + ", dressed flux " + sci(flux) + ", bare <a+a> " + sci(bare);
  return c;
}

CheckOutcome stationary_ground(int cutoff) {
  CheckOutcome c{"dressed_ground_stationary", true, {}};
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, std::numbers::pi / 4, 0.5, cutoff);
  s.probe = ProbeSpec{0.4, 0.2};
  s.losses.gamma_c = 5e-4;
  s.losses.gamma_q = {5e-4};
  s.losses.gamma_probe = 5e-4;
  s.numerics.levels = 12;
  const DressedFrame f(s);
  const auto traj = evolve(f, DensityMatrix::pure_level(f.levels(), 0), 0.0, 50.0,
                           f.max_stable_step(), EvolveOptions{1000, 0});
  const double excited = 1.0 - traj.states.back().value(0, 0).real();
  c.passed = std::abs(excited) < 1e-10;
  c.detail = "excited population after t = 50: " + sci(excited);
  return c;
}

CheckOutcome two_photon_vanishes() {
  CheckOutcome c{"two_photon_weight_v0", true, {}};
  const ProbeEffective p = probe_effective(ProbeSpec{0.4, 0.2}, 0.0);
  const double w = two_photon_rate_coefficient(p, 1e-2).weight;
  c.passed = w == 0.0 && p.omega_q_prime == 0.4;
  c.detail = "weight at v = 0: " + sci(w);
  return c;
}

CheckOutcome cutoff_convergence(int cutoff) {
  CheckOutcome c{"cutoff_convergence", true, {}};
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, std::numbers::pi / 4, 0.5, std::max(cutoff, 15));
  const ConvergenceReport r = convergence_check(s, ConvergenceQuantity::vev);
  c.passed = r.absolute_change < 1e-4;
  c.detail = "|v(N+5) - v(N)| = " + sci(r.absolute_change) + " at N = " + std::to_string(r.cutoff);
  return c;
}

}  // namespace

std::vector<CheckOutcome> run_oracle_checks(int fock_cutoff) {
  using Fn = CheckOutcome (*)(int);
  std::vector<CheckOutcome> out;
  for (Fn fn : {dispersive_vev, parity_zero, ground_emission, stationary_ground, cutoff_convergence}) {
    try {
      out.push_back(fn(fock_cutoff));
    } catch (const Error& e) {
      out.push_back({"error", false, e.what()});
    }
  }
  out.push_back(two_photon_vanishes());
  return out;
}

}  // namespace usc
