#include "usc/dispersive.hpp"
#include "usc/eigen.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace usc;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("analytic vev formula") {
  const auto zero = SystemSpec::equal_qubits(3, 1.7, 0.0, 0.05, 5);
  CHECK(analytic_vev(zero.qubits, 1.0) == 0.0);
  const auto one = SystemSpec::equal_qubits(1, 1.7, pi / 2, 0.05, 5);
  CHECK(analytic_vev(one.qubits, 1.0) == doctest::Approx(0.1));
  const auto three = SystemSpec::equal_qubits(3, 1.7, pi / 6, 0.05, 5);
  CHECK(analytic_vev(three.qubits, 1.0) == doctest::Approx(0.15));
  CHECK(analytic_vev(three.qubits, 2.0) == doctest::Approx(0.075));
}

TEST_CASE("analytic vev inside its validity envelope") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> th(0.2, pi / 2), dl(0.5, 1.0);
  for (double gmax : {0.05, 0.02}) {
    const double tol = gmax > 0.03 ? 0.05 : 0.01;
    std::uniform_real_distribution<double> gg(0.5 * gmax, gmax);
    for (int trial = 0; trial < 5; ++trial) {
      SystemSpec s;
      s.resonator.fock_cutoff = 12;
      for (int j = 0; j < 2; ++j) {
        s.qubits.push_back(QubitSpec::from_frequency_angle(1.0 + dl(rng), th(rng), gg(rng)));
      }
      const double a = analytic_vev(s.qubits, 1.0);
      CHECK(std::abs(ground_vev(s) - a) / std::abs(a) < tol);
    }
  }
}

TEST_CASE("effective probe") {
  const ProbeEffective p0 = probe_effective(ProbeSpec{0.4, 0.2}, 0.0);
  CHECK(p0.omega_q_prime == 0.4);
  CHECK(p0.alpha == 0.0);

  // g' = 0.05 and v = 4 give sin(alpha) = 0.4 when omega_q' = 1.
  const ProbeSpec p{std::sqrt(1.0 - 0.16), 0.05};
  const ProbeEffective e = probe_effective(p, 4.0);
  CHECK(e.omega_q_prime == doctest::Approx(1.0));
  CHECK(std::sin(e.alpha) == doctest::Approx(0.4));
  CHECK(e.omega_q_prime * std::sin(e.alpha) / (2.0 * 4.0) == doctest::Approx(0.05));
  CHECK(e.v_used == 4.0);
}

TEST_CASE("two-photon weight") {
  const ProbeEffective zero = probe_effective(ProbeSpec{0.4, 0.2}, 0.0);
  CHECK(two_photon_rate_coefficient(zero, 0.01).weight == 0.0);

  auto at_alpha = [](double alpha) {
    ProbeEffective p;
    p.omega_q_prime = 0.5;
    p.alpha = alpha;
    return two_photon_rate_coefficient(p, 0.01);
  };
  const double peak = at_alpha(pi / 4).weight;
  for (double a : {0.1, 0.4, 0.7, 1.0, 1.3}) {
    CHECK(at_alpha(a).weight < peak);
    CHECK(at_alpha(a).weight == doctest::Approx(at_alpha(pi / 2 - a).weight));
  }
  CHECK(peak == doctest::Approx(pi * 1e-4 / 0.25));
  CHECK(at_alpha(0.3).resonance == 0.25);
}
