#include "usc/config.hpp"
#include "usc/eigen.hpp"
#include "usc/error.hpp"
#include "usc/sweep.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>

using namespace usc;

namespace {

SweepPlan small_contour() {
  SweepPlan p;
  p.kind = SweepKind::vev_contour;
  p.base = SystemSpec::equal_qubits(1, 1.7, 0.0, 0.0, 14);
  p.axes = {{"qubits.g", 0.0, 0.4, 5}, {"qubits.theta", 0.0, std::numbers::pi / 2, 4}};
  p.outputs = {"vev", "abs_vev", "photon_number", "analytic_vev"};
  return p;
}

std::string csv(const SweepResult& r) {
  std::ostringstream os;
  write_csv(os, r);
  return os.str();
}

}  // namespace

TEST_CASE("axis values include both ends") {
  const SweepAxis a{"x", 0.6, 2.2, 5};
  CHECK(a.value(0) == 0.6);
  CHECK(a.value(4) == 2.2);
  CHECK(a.value(2) == doctest::Approx(1.4));
}

TEST_CASE("row order is first axis slowest") {
  const SweepPlan p = small_contour();
  REQUIRE(p.point_count() == 20);
  CHECK(p.point_axes(0) == std::vector<double>{0.0, 0.0});
  CHECK(p.point_axes(3)[0] == 0.0);
  CHECK(p.point_axes(3)[1] == doctest::Approx(std::numbers::pi / 2));
  CHECK(p.point_axes(4)[0] == doctest::Approx(0.1));
  CHECK(p.point_axes(4)[1] == 0.0);
  const SystemSpec s = p.point_spec(7);
  CHECK(s.qubits[0].g == doctest::Approx(0.1));
  CHECK(s.qubits[0].omega_q() == doctest::Approx(1.7));
  CHECK(s.qubits[0].theta() == doctest::Approx(std::numbers::pi / 2));
}

TEST_CASE("set_parameter") {
  SystemSpec s = SystemSpec::equal_qubits(2, 1.7, 0.3, 0.1, 10);
  CHECK(set_parameter(s, "qubit.1.g", 0.5));
  CHECK(s.qubits[0].g == 0.1);
  CHECK(s.qubits[1].g == 0.5);
  CHECK(set_parameter(s, "qubits.omega_q", 2.0));
  CHECK(s.qubits[1].omega_q() == doctest::Approx(2.0));
  CHECK(s.qubits[1].theta() == doctest::Approx(0.3));
  CHECK(set_parameter(s, "drive.frequency", 0.4));
  REQUIRE(s.drive);
  CHECK(s.drive->frequency == 0.4);
  CHECK(set_parameter(s, "losses.gamma", 1e-3));
  CHECK(s.losses.gamma_q == std::vector<double>{1e-3, 1e-3});
  CHECK_FALSE(set_parameter(s, "qubit.2.g", 0.1));
  CHECK_FALSE(set_parameter(s, "qubits.colour", 1.0));
  CHECK_FALSE(set_parameter(s, "nonsense", 1.0));
}

TEST_CASE("vev contour physics") {
  const SweepResult r = run_plan(small_contour(), 1);
  REQUIRE(r.rows.size() == 20);
  CHECK(r.failures() == 0);
  const auto v = r.column("abs_vev");
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    const double g = r.rows[i].axes[0];
    const double theta = r.rows[i].axes[1];
    CAPTURE(g);
    CAPTURE(theta);
    if (theta == 0.0 || g == 0.0) CHECK(v[i] < 1e-10);
  }
  // |v| grows with g at fixed theta = pi/2
  for (std::size_t gi = 1; gi + 1 < 5; ++gi) CHECK(v[(gi + 1) * 4 + 3] > v[gi * 4 + 3]);
  // and with theta at fixed g = 0.4
  for (std::size_t ti = 0; ti + 1 < 4; ++ti) CHECK(v[16 + ti + 1] > v[16 + ti]);
  // matches a direct diagonalization
  CHECK(r.column("vev")[18] == doctest::Approx(ground_vev(small_contour().point_spec(18))).epsilon(1e-12));
}

TEST_CASE("parallel runs are bitwise identical") {
  const SweepPlan p = small_contour();
  const std::string one = csv(run_plan(p, 1));
  const std::string many = csv(run_plan(p, 8));
  CHECK(one == many);
  CHECK(one.find("# sweep.kind = vev_contour") != std::string::npos);
  CHECK(one.find("qubits.g,qubits.theta,vev,abs_vev,photon_number,analytic_vev,converged,failed") !=
        std::string::npos);
}

TEST_CASE("parallel_for visits every index once and rethrows") {
  std::vector<std::atomic<int>> hits(100);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(parallel_for(10, 3, [](std::size_t i) {
                    if (i == 5) throw InvalidSpec("boom");
                  }),
                  InvalidSpec);
}

TEST_CASE("failed rows are recorded, not fatal") {
  SweepPlan p = small_contour();
  p.axes = {{"losses.gamma_c", -1.0, 1.0, 3}};
  p.outputs = {"vev"};
  const SweepResult r = run_plan(p, 2);
  CHECK(r.failures() == 1);
  CHECK(r.rows[0].result.failed);
  CHECK(std::isnan(r.rows[0].result.values[0]));
  CHECK(r.failure_fraction() == doctest::Approx(1.0 / 3));
  CHECK(r.failure_fraction() > kMaxFailureFraction);
  CHECK(csv(r).find("nan") != std::string::npos);
}

TEST_CASE("peak finding") {
  const std::vector<double> y{0, 1, 0, 0.5, 0.4, 3, 3, 1, 2, 0};
  CHECK(find_peaks(y, 0.0) == std::vector<std::size_t>{1, 3, 5, 8});
  CHECK(peak_prominence(y, 1) == 1.0);
  CHECK(peak_prominence(y, 3) == doctest::Approx(0.1));
  CHECK(peak_prominence(y, 5) == 3.0);
  CHECK(peak_prominence(y, 8) == 1.0);
  CHECK(find_peaks(y, 0.5) == std::vector<std::size_t>{1, 5, 8});
  // edges and monotone data are not peaks
  CHECK(find_peaks(std::vector<double>{3, 2, 1}, 0.0).empty());
  CHECK(find_peaks(std::vector<double>{1, 2, 3}, 0.0).empty());
  // Lorentzian sampled off-centre
  std::vector<double> l;
  for (int i = 0; i < 41; ++i) {
    const double x = 0.5 + i * 0.025;
    l.push_back(1.0 / (1.0 + std::pow((x - 0.93) / 0.01, 2)));
  }
  const auto pk = find_peaks(l, 1e-3);
  REQUIRE(pk.size() == 1);
  CHECK(0.5 + pk[0] * 0.025 == doctest::Approx(0.925));
}

TEST_CASE("uniform levels across a plan") {
  SweepPlan p;
  p.kind = SweepKind::absorption_spectrum;
  p.base = SystemSpec::equal_qubits(1, 1.7, 0.5, 0.3, 10);
  p.base.probe = ProbeSpec{0.4, 0.1};
  p.base.drive = DriveSpec{1e-3, 0.2};
  p.axes = {{"drive.frequency", 0.2, 1.1, 4}};
  p.outputs = {"probe_population"};
  const SweepPlan u = with_uniform_levels(p);
  CHECK(u.base.numerics.level_window == doctest::Approx(2.1));
  p.base.numerics.levels = 5;
  CHECK(with_uniform_levels(p).base.numerics.level_window == 0.0);
}

TEST_CASE("validation") {
  SweepPlan p = small_contour();
  p.outputs = {"probe_population"};
  CHECK_THROWS_AS(p.validate(), InvalidSpec);
  p = small_contour();
  p.axes.push_back(p.axes[0]);
  CHECK_THROWS_AS(p.validate(), InvalidSpec);
  p = small_contour();
  p.axes[0].count = 1;
  CHECK_THROWS_AS(p.validate(), InvalidSpec);
  CHECK(sweep_kind_from_string("emission_spectrum") == SweepKind::emission_spectrum);
  CHECK_THROWS_AS(sweep_kind_from_string("spiral"), InvalidSpec);
}

TEST_CASE("json writer") {
  SweepPlan p = small_contour();
  p.axes = {{"qubits.g", 0.0, 0.2, 2}};
  p.outputs = {"vev"};
  std::ostringstream os;
  write_json(os, run_plan(p, 1));
  const std::string s = os.str();
  CHECK(s.find("\"meta\"") != std::string::npos);
  CHECK(s.find("\"columns\"") != std::string::npos);
  CHECK(s.find("\"rows\"") != std::string::npos);
}
