#include "usc/error.hpp"
#include "usc/lindblad.hpp"
#include "usc/observables.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace usc;

namespace {

constexpr double pi = std::numbers::pi;

SystemSpec lossy_qubit(double g, double theta, int cutoff) {
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, theta, g, cutoff);
  s.losses.gamma_c = 1e-2;
  s.losses.gamma_q = {2e-2};
  return s;
}

DensityMatrix random_state(Index dim, std::mt19937& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Operator a(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    for (Index j = 0; j < dim; ++j) a(i, j) = Complex(n(rng), n(rng));
  }
  Operator rho = a * a.adjoint();
  rho /= rho.trace();
  return {rho};
}

}  // namespace

TEST_CASE("channels recover the bare dissipator at g = 0") {
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, 0.0, 0.0, 6);
  s.losses.gamma_c = 1e-3;
  const EigenSystem es = diagonalize_spec(s);
  const auto channels = build_channels(s, es);
  const SpaceLayout l = s.layout();
  int cavity = 0;
  for (const auto& c : channels) {
    CHECK(c.source == ChannelSource::cavity);
    CHECK(c.lower < c.upper);
    // Lower and upper differ by one photon with the qubit untouched.
    const StateVector up = es.states.col(c.upper), low = es.states.col(c.lower);
    const double n_up = up.dot(number(l) * up).real();
    const double n_low = low.dot(number(l) * low).real();
    CHECK(n_up - n_low == doctest::Approx(1.0));
    CHECK(c.rate == doctest::Approx(1e-3 * n_up));
    ++cavity;
  }
  CHECK(cavity == 2 * 5);
}

TEST_CASE("rates match an independent evaluation") {
  const SystemSpec s = lossy_qubit(0.4, pi / 4, 10);
  const EigenSystem es = diagonalize_spec(s);
  const SpaceLayout l = s.layout();
  const Operator xd = es.to_dressed(quadrature(l));
  const Operator sd = es.to_dressed(pauli(l, 0, PauliAxis::x));
  const DressedFrame f(s, es);
  const Index m = f.levels();
  for (Index k = 1; k < m; ++k) {
    double brute = 0.0;
    for (Index j = 0; j < k; ++j) {
      const double d = es.energies(k) - es.energies(j);
      brute += 1e-2 * d * d * std::norm(xd(j, k));
      brute += 2e-2 * (d / 1.7) * (d / 1.7) * std::norm(sd(j, k));
    }
    CHECK(f.decay_out()(k) == doctest::Approx(brute).epsilon(1e-9));
  }
  for (const auto& c : f.channels()) CHECK(c.rate > 0.0);
}

TEST_CASE("quasi-degenerate pairs barely decay into each other") {
  // Deep USC: the two lowest levels nearly coincide.
  SystemSpec s = lossy_qubit(2.2, 0.0, 40);
  const EigenSystem es = diagonalize_spec(s);
  CHECK(es.energies(1) - es.energies(0) < 1e-3);
  for (const auto& c : build_channels(s, es)) {
    if (c.lower == 0 && c.upper == 1) CHECK(c.rate < 1e-7);
  }
}

TEST_CASE("Liouvillian is trace-annihilating and keeps Hermiticity") {
  SystemSpec s = lossy_qubit(0.3, pi / 5, 10);
  s.probe = ProbeSpec{0.4, 0.1};
  s.losses.gamma_probe = 5e-3;
  s.drive = DriveSpec{0.05, 0.6};
  const DressedFrame f(s);
  const MasterEquation eq(f);
  std::mt19937 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    const DensityMatrix rho = random_state(f.levels(), rng);
    Operator out;
    eq.apply(0.7 * trial, rho.value, out);
    CHECK(std::abs(out.trace()) < 1e-10);
    CHECK(hermiticity_error(out) < 1e-12);
  }
}

TEST_CASE("ground state is a fixed point without drive") {
  SystemSpec s = lossy_qubit(0.5, pi / 4, 20);
  s.numerics.levels = 16;
  const DressedFrame f(s);
  const auto traj = evolve(f, DensityMatrix::pure_level(f.levels(), 0), 0.0, 200.0,
                           f.max_stable_step(), EvolveOptions{500, 0});
  const DensityMatrix& last = traj.states.back();
  CHECK(1.0 - last.value(0, 0).real() < 1e-10);
  CHECK(last.valid());
}

TEST_CASE("unitary limit conserves purity") {
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, pi / 4, 0.3, 10);
  s.numerics.levels = 8;
  const DressedFrame f(s);
  std::mt19937 rng(5);
  StateVector psi = StateVector::Zero(f.levels());
  psi(0) = 0.6;
  psi(2) = Complex(0.0, 0.8);
  const auto traj = evolve(f, DensityMatrix::from_state(psi), 0.0, 50.0, f.max_stable_step(),
                           EvolveOptions{100, 0});
  for (const auto& st : traj.states) {
    CHECK(std::abs(st.purity() - 1.0) < 1e-8);
    CHECK(st.hermiticity_error() < 1e-9);
  }
}

TEST_CASE("weak resonant drive follows two-level Rabi theory") {
  // Probe alone, coupled to the resonator only through dressing at g' = 0.
  SystemSpec s = SystemSpec::equal_qubits(0, 1.7, 0.0, 0.0, 3);
  s.probe = ProbeSpec{0.4, 0.0};
  const double e0 = 1e-3;
  s.drive = DriveSpec{e0, 0.4};
  s.numerics.levels = 2;
  const DressedFrame f(s);
  const Operator pe = f.project(excited_projector(s.layout(), 0));
  const double t = 200.0;
  const auto traj = evolve(f, DensityMatrix::pure_level(f.levels(), 0), 0.0, t,
                           f.max_stable_step(), EvolveOptions{1000000, 0});
  const double pop = expectation(traj.states.back(), pe).real();
  // E0 sin(wt) sigma_x -> Rabi frequency E0 in the rotating frame
  const double expected = std::pow(std::sin(0.5 * e0 * t), 2);
  CHECK(std::abs(pop - expected) / expected < 0.05);
}

TEST_CASE("integrator guards") {
  const SystemSpec s = lossy_qubit(0.3, 0.5, 8);
  const DressedFrame f(s);
  const DensityMatrix g = DensityMatrix::pure_level(f.levels(), 0);
  CHECK_THROWS_AS(evolve(f, g, 0.0, 1.0, 10.0 * f.max_stable_step()), InvalidSpec);
  DensityMatrix bad = g;
  bad.value(0, 0) = 2.0;
  CHECK_THROWS_AS(evolve(f, bad, 0.0, 1.0, f.max_stable_step()), IntegrationFailure);
}

TEST_CASE("trajectory csv") {
  SystemSpec s = lossy_qubit(0.3, 0.5, 8);
  s.numerics.levels = 4;
  const DressedFrame f(s);
  const auto traj = evolve(f, DensityMatrix::pure_level(4, 1), 0.0, 1.0, f.max_stable_step(),
                           EvolveOptions{10, 0});
  std::ostringstream os;
  const std::vector<std::string> names = {"p0", "p1"};
  std::vector<Operator> obs(2, Operator::Zero(4, 4));
  obs[0](0, 0) = 1.0;
  obs[1](1, 1) = 1.0;
  write_trajectory_csv(os, traj, names, obs);
  const std::string text = os.str();
  CHECK(text.rfind("t,p0,p1\n", 0) == 0);
  CHECK(text.find("0.0000000000000000e+00,0.0000000000000000e+00,1.0000000000000000e+00") !=
        std::string::npos);
}

TEST_CASE("period map agrees with direct stepping") {
  SystemSpec s = SystemSpec::equal_qubits(1, 1.7, pi / 4, 0.5, 15);
  s.probe = ProbeSpec{0.4, 0.2};
  s.drive = DriveSpec{5e-3, 0.47};
  s.losses.gamma_c = 5e-3;
  s.losses.gamma_q = {5e-3};
  s.losses.gamma_probe = 5e-3;
  const DressedFrame f(s);
  const Operator pe = f.project(excited_projector(s.layout(), 1));
  SteadyOptions a;
  a.window_periods = 5;
  SteadyOptions b = a;
  b.use_period_map = false;
  const auto ra = steady_state(f, std::span<const Operator>(&pe, 1), nullptr, a);
  const auto rb = steady_state(f, std::span<const Operator>(&pe, 1), nullptr, b);
  CHECK(std::abs(ra.averages[0] - rb.averages[0]) < 1e-10);
  CHECK(ra.transient == rb.transient);
  CHECK(ra.max_trace_error < 1e-8);
  CHECK(ra.min_eigenvalue > -1e-8);
}

TEST_CASE("steady response") {
  SystemSpec s = lossy_qubit(0.15, pi / 10, 12);
  const Operator x = quadrature(s.layout());
  const EigenSystem es = diagonalize_spec(s);
  const DressedOperator xd = dressed_decompose(x, es);
  // Undriven: the ground state emits nothing.
  const SteadyValue none = steady_response(s, es.to_bare(emission_operator(xd)), 100.0, 5);
  CHECK(std::abs(none.value) < 1e-12);

  s.modulation = ModulationSpec{0.15, 9e-4, 0.3};
  const DressedFrame f(s);
  const DressedOperator fx = f.decompose(x);
  const Operator emit = fx.minus * fx.plus;
  const auto r = steady_state(f, std::span<const Operator>(&emit, 1));
  CHECK(r.converged);
  CHECK(r.averages[0] >= 0.0);
  CHECK(std::abs(r.averages[0] - r.averages_doubled[0]) <= 0.01 * std::abs(r.averages_doubled[0]) + 1e-14);
}
