#include "usc/cli.hpp"

#include "builtin_plans.hpp"
#include "usc/checks.hpp"
#include "usc/config.hpp"
#include "usc/dispersive.hpp"
#include "usc/eigen.hpp"
#include "usc/error.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <limits>

namespace usc {

namespace {

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct GlobalOptions {
  std::string out = "-";
  std::string format = "csv";
  int cutoff = 0;
  int parallel = 1;
  std::uint64_t seed = 0;
};

// Output sink: stdout unless --out names a file.
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) : os_(&fallback) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw ConfigError("cannot write " + path, 0, "--out");
      os_ = &file_;
    }
  }
  std::ostream& get() { return *os_; }

 private:
  std::ofstream file_;
  std::ostream* os_;
};

void apply_cutoff(SystemSpec& s, const GlobalOptions& g) {
  if (g.cutoff > 0) s.resonator.fock_cutoff = g.cutoff;
}

void check_plan(const SweepPlan& plan) {
  try {
    plan.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
}

int report_rows(const SweepResult& r, std::ostream& err) {
  if (r.unconverged() > 0) {
    err << "warning: " << r.unconverged() << " of " << r.rows.size()
        << " rows did not converge (window doubling or cutoff test)\n";
  }
  for (const auto& row : r.rows) {
    if (row.result.failed) err << "warning: failed row: " << row.result.message << '\n';
  }
  if (r.failure_fraction() > kMaxFailureFraction) {
    err << "error: " << r.failures() << " of " << r.rows.size() << " rows failed\n";
    return 1;
  }
  return 0;
}

int run_vev(const GlobalOptions& g, const std::string& config, double coupling, double theta,
            double omega_q, int qubits, std::ostream& out, std::ostream& err) {
  SystemSpec s = config.empty() ? SystemSpec::equal_qubits(qubits > 0 ? qubits : 1, 1.7, 0.0, 0.0, 20)
                                : load_spec(config);
  if (!config.empty() && qubits > 0) {
    throw ConfigError("--qubits conflicts with a config file", 0, "--qubits");
  }
  apply_cutoff(s, g);
  if (!std::isnan(coupling)) set_parameter(s, "qubits.g", coupling);
  if (!std::isnan(omega_q)) set_parameter(s, "qubits.omega_q", omega_q);
  if (!std::isnan(theta)) set_parameter(s, "qubits.theta", theta);
  try {
    s.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  const ConvergenceReport conv = convergence_check(s, ConvergenceQuantity::vev);
  if (conv.flagged) {
    err << "warning: v changes by " << conv.relative_change << " (relative) from cutoff "
        << conv.cutoff << " to " << conv.cutoff + 5 << '\n';
  }
  const double v = conv.value + 0.0;  // no "-0"
  Sink sink(g.out, out);
  if (g.format == "json") {
    nlohmann::ordered_json doc;
    doc["vev"] = v;
    doc["analytic_vev"] = analytic_vev(s.qubits, s.resonator.omega_c);
    doc["cutoff"] = s.resonator.fock_cutoff;
    doc["converged"] = !conv.flagged;
    doc["relative_change"] = conv.relative_change;
    sink.get() << doc.dump(2) << '\n';
  } else {
    sink.get() << format_number(v) << '\n';
  }
  return 0;
}

SweepPlan spectrum_plan(const GlobalOptions& g, const std::string& path, const char* builtin,
                        double theta) {
  SweepPlan plan = path.empty() ? parse_plan_text(builtin) : load_plan(path);
  apply_cutoff(plan.base, g);
  if (!std::isnan(theta)) set_parameter(plan.base, "qubits.theta", theta);
  check_plan(plan);
  if (plan.axes.size() != 1) throw ConfigError("a spectrum needs exactly one axis", 0, "sweep.axis.1");
  return plan;
}

int run_spectrum(const GlobalOptions& g, const SweepPlan& plan, const std::string& spectrum_path,
                 std::ostream& out, std::ostream& err) {
  SpectrumAnalysis a = analyze_spectrum(plan, g.parallel);
  a.spectrum.meta.emplace_back("seed", std::to_string(g.seed));
  const int status = report_rows(a.spectrum, err);
  if (!spectrum_path.empty()) {
    Sink s(spectrum_path, out);
    g.format == "json" ? write_json(s.get(), a.spectrum) : write_csv(s.get(), a.spectrum);
  }
  Sink sink(g.out, out);
  g.format == "json" ? write_peaks_json(sink.get(), a) : write_peaks_csv(sink.get(), a);
  return status;
}

int run_sweep(const GlobalOptions& g, const std::string& path, std::ostream& out, std::ostream& err) {
  SweepPlan plan = load_plan(path);
  apply_cutoff(plan.base, g);
  check_plan(plan);
  SweepResult r = run_plan(plan, g.parallel);
  r.meta.emplace_back("seed", std::to_string(g.seed));
  const int status = report_rows(r, err);
  Sink sink(g.out, out);
  g.format == "json" ? write_json(sink.get(), r) : write_csv(sink.get(), r);
  return status;
}

int run_check(const GlobalOptions& g, std::ostream& out) {
  const auto results = run_oracle_checks(g.cutoff > 0 ? g.cutoff : 20);
  Sink sink(g.out, out);
  bool ok = true;
  for (const auto& c : results) {
    sink.get() << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    ok = ok && c.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ultrastrong-coupling circuit QED simulator", "uscqed"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--out", g.out, "Output path ('-' for stdout)");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--cutoff", g.cutoff, "Fock cutoff override")->check(CLI::Range(2, 1000));
  app.add_option("--parallel", g.parallel, "Worker threads")->check(CLI::Range(1, 1024));
  app.add_option("--seed", g.seed, "Recorded in the output metadata; the physics is deterministic");

  std::string vev_config;
  double coupling = kUnset, theta = kUnset, omega_q = kUnset;
  int qubits = 0;
  auto* vev = app.add_subcommand("vev", "Ground-state <X> of the resonator");
  vev->add_option("config", vev_config, "System config file")->check(CLI::ExistingFile);
  vev->add_option("--g", coupling, "Coupling of every qubit");
  vev->add_option("--theta", theta, "Flux angle of every qubit");
  vev->add_option("--omega-q", omega_q, "Qubit frequency (default 1.7)");
  vev->add_option("--qubits", qubits, "Number of equal qubits (default 1)")->check(CLI::Range(1, 8));

  std::string emit_plan, emit_spectrum;
  double emit_theta = kUnset;
  auto* emit = app.add_subcommand("emit", "Emission spectrum under coupling modulation");
  emit->add_option("plan", emit_plan, "Sweep plan (default: built-in single-qubit scenario)")
      ->check(CLI::ExistingFile);
  emit->add_option("--theta", emit_theta, "Override the flux angle");
  emit->add_option("--spectrum", emit_spectrum, "Also write the sampled spectrum here");

  std::string absorb_plan, absorb_spectrum;
  double absorb_theta = kUnset;
  auto* absorb = app.add_subcommand("absorb", "Probe-qubit absorption spectrum");
  absorb->add_option("plan", absorb_plan, "Sweep plan (default: built-in probe scenario)")
      ->check(CLI::ExistingFile);
  absorb->add_option("--theta", absorb_theta, "Override the flux angle");
  absorb->add_option("--spectrum", absorb_spectrum, "Also write the sampled spectrum here");

  std::string sweep_plan;
  auto* sweep = app.add_subcommand("sweep", "Run a sweep plan");
  sweep->add_option("plan", sweep_plan, "Sweep plan file")->required()->check(CLI::ExistingFile);

  auto* check = app.add_subcommand("check", "Cross-check numerics against analytic limits");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (vev->parsed()) return run_vev(g, vev_config, coupling, theta, omega_q, qubits, out, err);
    if (emit->parsed()) {
      return run_spectrum(g, spectrum_plan(g, emit_plan, builtin::kEmissionPlan, emit_theta),
                          emit_spectrum, out, err);
    }
    if (absorb->parsed()) {
      return run_spectrum(g, spectrum_plan(g, absorb_plan, builtin::kAbsorptionPlan, absorb_theta),
                          absorb_spectrum, out, err);
    }
    if (sweep->parsed()) return run_sweep(g, sweep_plan, out, err);
    if (check->parsed()) return run_check(g, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace usc
