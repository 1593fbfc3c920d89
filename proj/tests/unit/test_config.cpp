#include "usc/config.hpp"
#include "usc/error.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace usc;

namespace {

constexpr double pi = std::numbers::pi;

int error_line(const std::string& text) {
  try {
    parse_plan_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string error_field(const std::string& text) {
  try {
    parse_spec_text(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "<none>";
}

const char* kFull = R"(# everything at once
resonator.omega_c = 1
numerics.cutoff = 12
qubits.count = 2
qubits.omega_q = 1.7
qubits.theta = pi/4
qubits.g = 0.3
qubit.1.delta = 1.1
qubit.1.epsilon = 0.2
probe.delta_prime = 0.4
probe.g_prime = 0.2
drive.amplitude = 5e-3
drive.frequency = 0.47
losses.gamma_c = 1e-3
losses.gamma_q = 2e-3
losses.gamma_q.1 = 3e-3
losses.gamma_probe = 5e-4
numerics.dt = 0.01
numerics.window = 30
numerics.levels = 6
)";

}  // namespace

TEST_CASE("numbers") {
  CHECK(parse_number("1.5") == 1.5);
  CHECK(parse_number(" -2e-3 ") == -2e-3);
  CHECK(parse_number("+4") == 4.0);
  CHECK(parse_number("pi") == pi);
  CHECK(parse_number("-pi") == -pi);
  CHECK(parse_number("pi/4") == pi / 4);
  CHECK(parse_number("0.5*pi") == 0.5 * pi);
  CHECK(parse_number("3*pi/8") == 3 * pi / 8);
  CHECK_THROWS_AS(parse_number("abc"), ConfigError);
  CHECK_THROWS_AS(parse_number("pi/0"), ConfigError);
  CHECK_THROWS_AS(parse_number("1.0x"), ConfigError);
}

TEST_CASE("spec parsing") {
  const SystemSpec s = parse_spec_text(kFull);
  REQUIRE(s.qubits.size() == 2);
  CHECK(s.qubits[0].omega_q() == doctest::Approx(1.7));
  CHECK(s.qubits[0].theta() == doctest::Approx(pi / 4));
  CHECK(s.qubits[1].gap_delta == 1.1);
  CHECK(s.qubits[1].flux_offset_energy == 0.2);
  CHECK(s.qubits[1].g == 0.3);
  CHECK(s.resonator.fock_cutoff == 12);
  REQUIRE(s.probe);
  CHECK(s.probe->g_prime == 0.2);
  REQUIRE(s.drive);
  CHECK(s.drive->frequency == 0.47);
  CHECK_FALSE(s.modulation);
  CHECK(s.losses.gamma_q == std::vector<double>{2e-3, 3e-3});
  CHECK(s.numerics.levels == 6);
  CHECK(s.numerics.window == 30);
}

TEST_CASE("config round trip") {
  const SystemSpec s = parse_spec_text(kFull);
  const SystemSpec again = parse_spec_text(serialize_spec(s));
  CHECK(again == s);
  CHECK(serialize_spec(again) == serialize_spec(s));

  SystemSpec m = parse_spec_text("qubits.omega_q = 1.7\nqubits.theta = pi/10\nqubits.g = 0.15\n"
                                 "modulation.g0 = 0.15\nmodulation.g1 = 9e-4\nmodulation.frequency = 0.1\n");
  CHECK(parse_spec_text(serialize_spec(m)) == m);

  const SweepPlan p = load_plan(USC_CONFIG_DIR "/absorption.cfg");
  CHECK(parse_plan_text(serialize_plan(p)) == p);
}

TEST_CASE("diagnostics carry line and field") {
  CHECK(error_field("qubits.g = 0.1\nqubits.omega_q = two\n") == "qubits.omega_q");
  CHECK(error_field("qubits.omega_q = 1\nbogus.key = 1\n") == "bogus.key");
  CHECK(error_field("qubits.omega_q = 1\nnumerics.cutoff = 2.5\n") == "numerics.cutoff");
  CHECK(error_field("losses.gamma_q.3 = 1e-3\nqubits.omega_q = 1.7\n") == "losses.gamma_q.3");

  try {
    parse_spec_text("qubits.omega_q = 1\n\n# comment\nqubits.g = 1\nqubits.g = 2\n");
    FAIL("duplicate accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 5);
    CHECK(e.field() == "qubits.g");
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  try {
    parse_spec_text("qubits.omega_q 1.7\n");
    FAIL("missing '=' accepted");
  } catch (const ConfigError& e) {
    CHECK(e.line() == 1);
  }
  // mixed parametrisations
  CHECK_THROWS_AS(parse_spec_text("qubit.0.delta = 1\nqubit.0.theta = 0.3\n"), ConfigError);
  // physics invariants surface as config errors
  CHECK_THROWS_AS(parse_spec_text("qubits.omega_q = 1.7\nmodulation.g0 = 0.1\nmodulation.g1 = 0.2\n"),
                  ConfigError);
  CHECK_THROWS_AS(parse_spec_text("qubits.omega_q = 1.7\ndrive.amplitude = 0.1\n"), ConfigError);
}

TEST_CASE("plan parsing") {
  const std::string base = "qubits.omega_q = 1.7\nqubits.g = 0.1\n";
  const SweepPlan p = parse_plan_text(base +
                                      "sweep.kind = vev_contour\n"
                                      "sweep.axis.0.name = qubits.g\n"
                                      "sweep.axis.0.start = 0\n"
                                      "sweep.axis.0.stop = 0.8\n"
                                      "sweep.axis.0.count = 5\n"
                                      "sweep.axis.1.name = qubits.theta\n"
                                      "sweep.axis.1.start = 0\n"
                                      "sweep.axis.1.stop = pi/2\n"
                                      "sweep.axis.1.count = 3\n");
  CHECK(p.kind == SweepKind::vev_contour);
  CHECK(p.point_count() == 15);
  CHECK(p.outputs == default_outputs(SweepKind::vev_contour));
  CHECK(p.axes[1].stop == pi / 2);

  CHECK(error_line(base + "sweep.kind = spiral\n") == 3);
  CHECK(error_line(base + "sweep.kind = vev_contour\nsweep.axis.0.name = qubits.colour\n"
                          "sweep.axis.0.start = 0\nsweep.axis.0.stop = 1\nsweep.axis.0.count = 3\n") == 4);
  CHECK(error_line(base + "sweep.kind = vev_contour\nsweep.axis.0.name = qubits.g\n"
                          "sweep.axis.0.start = 0\nsweep.axis.0.stop = 1\nsweep.axis.0.count = 1\n") == 7);
  CHECK(error_line(base + "sweep.kind = vev_contour\nsweep.outputs = vev, colour\n") == 4);
  // outputs that need a probe
  CHECK_THROWS_AS(parse_plan_text(base + "sweep.kind = absorption_spectrum\n"
                                         "sweep.axis.0.name = qubits.g\nsweep.axis.0.start = 0\n"
                                         "sweep.axis.0.stop = 1\nsweep.axis.0.count = 3\n"),
                  ConfigError);
}

TEST_CASE("shipped configs parse") {
  for (const char* name : {"vev_contour.cfg", "emission.cfg", "absorption.cfg"}) {
    CAPTURE(name);
    const SweepPlan p = load_plan(std::string(USC_CONFIG_DIR) + "/" + name);
    CHECK_NOTHROW(p.validate());
  }
  try {
    load_plan(USC_CONFIG_DIR "/missing.cfg");
    FAIL("missing file accepted");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("missing.cfg") != std::string::npos);
  }
}
