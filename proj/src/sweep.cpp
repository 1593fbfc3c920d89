#include "usc/sweep.hpp"

#include "usc/config.hpp"
#include "usc/dispersive.hpp"
#include "usc/error.hpp"
#include "usc/observables.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace usc {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kStaticOutputs = {
    "vev",           "abs_vev",  "ground_energy",     "photon_number",
    "first_order_coherence",     "analytic_vev",      "omega_q_prime",
    "alpha",         "two_photon_weight", "two_photon_resonance"};

const std::vector<std::string> kDynamicOutputs = {
    "emission_total", "emission_coherent", "emission_incoherent",
    "qubit_emission", "probe_emission",    "probe_population"};

bool contains(std::span<const std::string> names, const std::string& name) {
  return std::find(names.begin(), names.end(), name) != names.end();
}

bool needs_probe(const std::string& name) {
  return name == "omega_q_prime" || name == "alpha" || name == "two_photon_weight" ||
         name == "two_photon_resonance" || name == "probe_emission" || name == "probe_population";
}

bool set_qubit(QubitSpec& q, const std::string& field, double value) {
  if (field == "g") {
    q.g = value;
  } else if (field == "theta") {
    q = QubitSpec::from_frequency_angle(q.omega_q(), value, q.g);
  } else if (field == "omega_q") {
    q = QubitSpec::from_frequency_angle(value, q.theta(), q.g);
  } else if (field == "delta") {
    q.gap_delta = value;
  } else if (field == "epsilon") {
    q.flux_offset_energy = value;
  } else {
    return false;
  }
  return true;
}

std::string fmt16(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

std::vector<std::pair<std::string, std::string>> plan_meta(const SweepPlan& plan) {
  std::vector<std::pair<std::string, std::string>> meta;
  std::istringstream in(serialize_plan(plan));
  for (const auto& e : read_entries(in)) meta.emplace_back(e.key, e.value);
  return meta;
}

void write_meta(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& meta) {
  for (const auto& [k, v] : meta) os << "# " << k << " = " << v << '\n';
}

nlohmann::ordered_json meta_json(const std::vector<std::pair<std::string, std::string>>& meta) {
  nlohmann::ordered_json m = nlohmann::ordered_json::object();
  for (const auto& [k, v] : meta) m[k] = v;
  return m;
}

nlohmann::ordered_json number_json(double x) {
  return std::isfinite(x) ? nlohmann::ordered_json(x) : nlohmann::ordered_json(nullptr);
}

const std::string& spectrum_target(const SweepPlan& plan) {
  static const std::string absorption = "probe_population";
  static const std::string emission = "emission_total";
  if (plan.kind == SweepKind::absorption_spectrum && contains(plan.outputs, absorption)) {
    return absorption;
  }
  if (plan.kind == SweepKind::emission_spectrum && contains(plan.outputs, emission)) {
    return emission;
  }
  return plan.outputs.front();
}

}  // namespace

std::string to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::vev_contour: return "vev_contour";
    case SweepKind::emission_spectrum: return "emission_spectrum";
    case SweepKind::absorption_spectrum: return "absorption_spectrum";
    case SweepKind::custom_scalar: return "custom_scalar";
  }
  return "custom_scalar";
}

SweepKind sweep_kind_from_string(const std::string& name) {
  for (auto k : {SweepKind::vev_contour, SweepKind::emission_spectrum,
                 SweepKind::absorption_spectrum, SweepKind::custom_scalar}) {
    if (to_string(k) == name) return k;
  }
  throw InvalidSpec("unknown sweep kind '" + name + "'");
}

double SweepAxis::value(int i) const {
  if (i == count - 1) return stop;
  return start + (stop - start) * static_cast<double>(i) / static_cast<double>(count - 1);
}

const std::vector<std::string>& output_catalog() {
  static const std::vector<std::string> all = [] {
    std::vector<std::string> v = kStaticOutputs;
    v.insert(v.end(), kDynamicOutputs.begin(), kDynamicOutputs.end());
    return v;
  }();
  return all;
}

bool is_known_output(const std::string& name) { return contains(output_catalog(), name); }

bool is_dynamic_output(const std::string& name) { return contains(kDynamicOutputs, name); }

std::vector<std::string> default_outputs(SweepKind kind) {
  switch (kind) {
    case SweepKind::vev_contour: return {"abs_vev", "vev"};
    case SweepKind::emission_spectrum:
      return {"emission_total", "emission_coherent", "emission_incoherent"};
    case SweepKind::absorption_spectrum: return {"probe_population"};
    case SweepKind::custom_scalar: return {"vev"};
  }
  return {"vev"};
}

bool set_parameter(SystemSpec& spec, const std::string& name, double value) {
  const auto dot = name.find('.');
  if (dot == std::string::npos) return false;
  const std::string section = name.substr(0, dot);
  const std::string field = name.substr(dot + 1);
  if (name == "resonator.omega_c") {
    spec.resonator.omega_c = value;
  } else if (name == "numerics.cutoff") {
    spec.resonator.fock_cutoff = static_cast<int>(std::lround(value));
  } else if (section == "qubits") {
    QubitSpec scratch;
    if (!set_qubit(scratch, field, 1.0)) return false;
    for (auto& q : spec.qubits) set_qubit(q, field, value);
  } else if (section == "qubit") {
    const auto dot2 = field.find('.');
    if (dot2 == std::string::npos) return false;
    const std::string index = field.substr(0, dot2);
    if (index.empty() || index.find_first_not_of("0123456789") != std::string::npos) return false;
    const std::size_t j = std::stoul(index);
    if (j >= spec.qubits.size()) return false;
    return set_qubit(spec.qubits[j], field.substr(dot2 + 1), value);
  } else if (name == "probe.delta_prime" || name == "probe.g_prime") {
    if (!spec.probe) spec.probe = ProbeSpec{};
    (field == "delta_prime" ? spec.probe->gap_delta_prime : spec.probe->g_prime) = value;
  } else if (name == "drive.amplitude" || name == "drive.frequency") {
    if (!spec.drive) spec.drive = DriveSpec{};
    (field == "amplitude" ? spec.drive->amplitude : spec.drive->frequency) = value;
  } else if (name == "modulation.g0" || name == "modulation.g1" || name == "modulation.frequency") {
    if (!spec.modulation) spec.modulation = ModulationSpec{};
    auto& m = *spec.modulation;
    (field == "g0" ? m.g0 : field == "g1" ? m.g1 : m.frequency) = value;
  } else if (name == "losses.gamma_c") {
    spec.losses.gamma_c = value;
  } else if (name == "losses.gamma_q") {
    spec.losses.gamma_q.assign(spec.qubits.size(), value);
  } else if (name == "losses.gamma_probe") {
    spec.losses.gamma_probe = value;
  } else if (name == "losses.gamma") {
    spec.losses.gamma_c = value;
    spec.losses.gamma_q.assign(spec.qubits.size(), value);
    spec.losses.gamma_probe = value;
  } else if (name == "numerics.dt") {
    spec.numerics.dt = value;
  } else if (name == "numerics.transient") {
    spec.numerics.transient = value;
  } else if (name == "numerics.window") {
    spec.numerics.window = value;
  } else {
    return false;
  }
  return true;
}

void SweepPlan::validate() const {
  if (axes.empty() || axes.size() > 2) throw InvalidSpec("a sweep needs one or two axes");
  for (const auto& a : axes) {
    if (a.count < 2) throw InvalidSpec("axis '" + a.name + "' needs count >= 2");
    if (!std::isfinite(a.start) || !std::isfinite(a.stop)) {
      throw InvalidSpec("axis '" + a.name + "' has a non-finite range");
    }
    SystemSpec trial = base;
    if (!set_parameter(trial, a.name, a.start)) {
      throw InvalidSpec("'" + a.name + "' is not a sweepable parameter");
    }
  }
  if (outputs.empty()) throw InvalidSpec("no outputs requested");
  for (const auto& o : outputs) {
    if (!is_known_output(o)) throw InvalidSpec("unknown output '" + o + "'");
    if (needs_probe(o) && !base.probe) throw InvalidSpec("output '" + o + "' needs a probe qubit");
    if (o == "qubit_emission" && base.qubits.empty()) {
      throw InvalidSpec("output 'qubit_emission' needs at least one qubit");
    }
  }
  base.validate();
}

std::size_t SweepPlan::point_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

std::vector<double> SweepPlan::point_axes(std::size_t row) const {
  std::vector<double> v(axes.size());
  for (std::size_t i = axes.size(); i-- > 0;) {
    const auto c = static_cast<std::size_t>(axes[i].count);
    v[i] = axes[i].value(static_cast<int>(row % c));
    row /= c;
  }
  return v;
}

SystemSpec SweepPlan::point_spec(std::size_t row) const {
  SystemSpec s = base;
  const auto values = point_axes(row);
  for (std::size_t i = 0; i < axes.size(); ++i) {
    if (!set_parameter(s, axes[i].name, values[i])) {
      throw InvalidSpec("'" + axes[i].name + "' is not a sweepable parameter");
    }
  }
  return s;
}

PointResult evaluate_point(const SystemSpec& spec, std::span<const std::string> outputs) {
  PointResult r;
  r.values.assign(outputs.size(), kNaN);
  try {
    spec.validate();
    auto set = [&](const std::string& name, double v) {
      for (std::size_t i = 0; i < outputs.size(); ++i) {
        if (outputs[i] == name) r.values[i] = v;
      }
    };
    auto wants = [&](std::initializer_list<const char*> names) {
      for (const char* n : names) {
        if (contains(outputs, n)) return true;
      }
      return false;
    };

    if (wants({"vev", "abs_vev", "ground_energy", "photon_number", "first_order_coherence"})) {
      const GroundProperties gp = ground_properties(spec);
      set("vev", gp.vev);
      set("abs_vev", std::abs(gp.vev));
      set("ground_energy", gp.energy);
      set("photon_number", gp.photon_number);
      set("first_order_coherence",
          gp.photon_number < 1e-300 ? 1.0 : std::norm(gp.field_amplitude) / gp.photon_number);
      SystemSpec refined = spec;
      refined.resonator.fock_cutoff += 5;
      const double v5 = ground_vev(refined);
      if (std::abs(v5 - gp.vev) / std::max(std::abs(v5), 1e-8) > kConvergenceFlagThreshold) {
        r.converged = false;
      }
    }
    if (wants({"analytic_vev"})) set("analytic_vev", analytic_vev(spec.qubits, spec.resonator.omega_c));
    if (wants({"omega_q_prime", "alpha", "two_photon_weight", "two_photon_resonance"})) {
      if (!spec.probe) throw InvalidSpec("probe outputs need a probe qubit");
      const ProbeEffective pe = probe_effective(*spec.probe, ground_vev(spec.usc_only()));
      const TwoPhotonLine line =
          two_photon_rate_coefficient(pe, spec.drive ? spec.drive->amplitude : 0.0);
      set("omega_q_prime", pe.omega_q_prime);
      set("alpha", pe.alpha);
      set("two_photon_weight", line.weight);
      set("two_photon_resonance", line.resonance);
    }

    bool dynamic = false;
    for (const auto& o : outputs) dynamic = dynamic || is_dynamic_output(o);
    if (dynamic) {
      const DressedFrame frame(spec);
      const SpaceLayout layout = spec.layout();
      std::vector<Operator> observables;
      std::vector<std::string> names;
      auto add = [&](const std::string& name, Operator op) {
        names.push_back(name);
        observables.push_back(std::move(op));
      };
      const bool emission = wants({"emission_total", "emission_coherent", "emission_incoherent"});
      DressedOperator xd;
      if (emission) {
        xd = frame.decompose(quadrature(layout));
        add("emission_total", emission_operator(xd));
      }
      if (wants({"qubit_emission"})) {
        Operator sum = Operator::Zero(frame.levels(), frame.levels());
        for (int j = 0; j < layout.n_qubits(); ++j) {
          const DressedOperator s = frame.decompose(pauli(layout, j, PauliAxis::x));
          sum += s.minus * s.plus;
        }
        add("qubit_emission", sum);
      }
      if (wants({"probe_emission"})) {
        const DressedOperator s = frame.decompose(pauli(layout, layout.probe_index(), PauliAxis::x));
        add("probe_emission", s.minus * s.plus);
      }
      if (wants({"probe_population"})) add("probe_population", probe_projector(frame));

      const SteadyResult sr =
          steady_state(frame, observables, emission ? &xd.plus : nullptr, SteadyOptions{});
      r.converged = r.converged && sr.converged;
      for (std::size_t i = 0; i < names.size(); ++i) set(names[i], sr.averages[i]);
      if (emission) {
        const double total = std::max(0.0, sr.averages[0]);
        const double coherent = std::norm(sr.lockin);
        set("emission_total", total);
        set("emission_coherent", coherent);
        set("emission_incoherent", total - coherent);
      }
    }
  } catch (const Error& e) {
    r.failed = true;
    r.converged = false;
    r.message = e.what();
    std::fill(r.values.begin(), r.values.end(), kNaN);
  }
  return r;
}

std::size_t SweepResult::failures() const {
  return static_cast<std::size_t>(
      std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) { return r.result.failed; }));
}

std::size_t SweepResult::unconverged() const {
  return static_cast<std::size_t>(std::count_if(rows.begin(), rows.end(), [](const SweepRow& r) {
    return !r.result.failed && !r.result.converged;
  }));
}

double SweepResult::failure_fraction() const {
  return rows.empty() ? 0.0 : static_cast<double>(failures()) / static_cast<double>(rows.size());
}

std::size_t SweepResult::output_index(const std::string& name) const {
  const auto it = std::find(output_names.begin(), output_names.end(), name);
  if (it == output_names.end()) throw InvalidSpec("no output column '" + name + "'");
  return static_cast<std::size_t>(it - output_names.begin());
}

std::vector<double> SweepResult::column(const std::string& name) const {
  const std::size_t i = output_index(name);
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.result.values[i]);
  return out;
}

std::vector<double> SweepResult::axis_column(std::size_t axis) const {
  std::vector<double> out;
  out.reserve(rows.size());
  for (const auto& r : rows) out.push_back(r.axes.at(axis));
  return out;
}

SweepPlan with_uniform_levels(SweepPlan plan) {
  NumericsSpec& n = plan.base.numerics;
  if (n.levels > 0 || n.level_window > 0.0) return plan;
  double fastest = 0.0;
  for (std::size_t i = 0; i < plan.point_count(); ++i) {
    fastest = std::max(fastest, max_drive_frequency(plan.point_spec(i)));
  }
  n.level_window = fastest + plan.base.resonator.omega_c;
  return plan;
}

void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, parallelism)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
            next = n;
          }
        }
      });
    }
  }
  if (first_error) std::rethrow_exception(first_error);
}

SweepResult run_plan(const SweepPlan& input, int parallelism) {
  input.validate();
  const SweepPlan plan = with_uniform_levels(input);
  SweepResult result;
  for (const auto& a : plan.axes) result.axis_names.push_back(a.name);
  result.output_names = plan.outputs;
  result.rows.resize(plan.point_count());
  parallel_for(result.rows.size(), parallelism, [&](std::size_t i) {
    result.rows[i].axes = plan.point_axes(i);
    result.rows[i].result = evaluate_point(plan.point_spec(i), plan.outputs);
  });
  result.meta = plan_meta(plan);
  result.meta.emplace_back("rows", std::to_string(result.rows.size()));
  result.meta.emplace_back("failed_rows", std::to_string(result.failures()));
  result.meta.emplace_back("unconverged_rows", std::to_string(result.unconverged()));
  return result;
}

double peak_prominence(std::span<const double> y, std::size_t i) {
  const double h = y[i];
  double left = h;
  for (std::size_t j = i; j-- > 0;) {
    if (y[j] > h) break;
    left = std::min(left, y[j]);
  }
  double right = h;
  for (std::size_t j = i + 1; j < y.size(); ++j) {
    if (y[j] > h) break;
    right = std::min(right, y[j]);
  }
  return h - std::max(left, right);
}

std::vector<std::size_t> find_peaks(std::span<const double> y, double min_prominence) {
  std::vector<std::size_t> out;
  const std::size_t n = y.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(y[i] > y[i - 1])) continue;
    std::size_t j = i;
    while (j + 1 < n && y[j + 1] == y[i]) ++j;
    if (j + 1 < n && y[j + 1] < y[i] && peak_prominence(y, i) >= min_prominence) out.push_back(i);
    i = j;
  }
  return out;
}

SpectrumAnalysis analyze_spectrum(const SweepPlan& input, int parallelism) {
  input.validate();
  if (input.axes.size() != 1) throw InvalidSpec("spectrum analysis needs exactly one axis");
  const SweepPlan plan = with_uniform_levels(input);
  SpectrumAnalysis out;
  out.target = spectrum_target(plan);
  const std::size_t target = static_cast<std::size_t>(
      std::find(plan.outputs.begin(), plan.outputs.end(), out.target) - plan.outputs.begin());
  const SweepAxis& axis = plan.axes.front();
  const double lo = std::min(axis.start, axis.stop);
  const double hi = std::max(axis.start, axis.stop);

  SweepResult coarse = run_plan(plan, parallelism);
  out.spectrum.axis_names = coarse.axis_names;
  out.spectrum.output_names = coarse.output_names;
  out.spectrum.meta = coarse.meta;

  auto spec_at = [&](double x) {
    SystemSpec s = plan.base;
    set_parameter(s, axis.name, x);
    return s;
  };
  auto run_points = [&](const std::vector<double>& xs) {
    std::vector<SweepRow> rows(xs.size());
    parallel_for(xs.size(), parallelism, [&](std::size_t i) {
      rows[i].axes = {xs[i]};
      rows[i].result = evaluate_point(spec_at(xs[i]), plan.outputs);
    });
    return rows;
  };

  // Dressed resonances (E_k - E_0) / n of the retained levels.
  const DressedFrame frame(spec_at(lo));
  const Eigen::VectorXd& e = frame.energies();
  struct Resonance {
    int level;
    int order;
    double location;
    double halfwidth;
  };
  std::vector<Resonance> resonances;
  for (Index k = 1; k < frame.levels(); ++k) {
    for (int n = 1; n <= plan.peaks.max_order; ++n) {
      const double width = std::max(frame.decay_out()(k) / (2.0 * n), 1e-5);
      resonances.push_back({static_cast<int>(k), n, e(k) / n, width});
    }
  }

  std::vector<SweepRow> rows = coarse.rows;
  const bool zoom = plan.peaks.zoom_points >= 2 &&
                    (axis.name == "drive.frequency" || axis.name == "modulation.frequency");
  if (zoom) {
    std::vector<double> xs;
    for (const auto& r : resonances) {
      if (r.location < lo || r.location > hi) continue;
      const double hw = plan.peaks.zoom_halfwidth > 0.0 ? plan.peaks.zoom_halfwidth : 12.0 * r.halfwidth;
      const int m = plan.peaks.zoom_points;
      for (int i = 0; i < m; ++i) {
        const double x = r.location - hw + 2.0 * hw * i / (m - 1);
        if (x >= lo && x <= hi) xs.push_back(x);
      }
    }
    auto extra = run_points(xs);
    rows.insert(rows.end(), extra.begin(), extra.end());
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return a.axes[0] < b.axes[0]; });
  rows.erase(std::unique(rows.begin(), rows.end(),
                         [](const SweepRow& a, const SweepRow& b) { return a.axes[0] == b.axes[0]; }),
             rows.end());
  out.spectrum.rows = rows;
  out.spectrum.meta.emplace_back("spectrum_points", std::to_string(rows.size()));

  std::vector<double> xs, ys;
  std::vector<const SweepRow*> good;
  for (const auto& r : rows) {
    if (r.result.failed) continue;
    xs.push_back(r.axes[0]);
    ys.push_back(r.result.values[target]);
    good.push_back(&r);
  }
  if (ys.size() < 3) return out;
  double threshold = plan.peaks.min_prominence;
  if (threshold <= 0.0) {
    const auto [mn, mx] = std::minmax_element(ys.begin(), ys.end());
    threshold = 1e-3 * (*mx - *mn);
  }
  const auto idx = find_peaks(ys, threshold);

  std::vector<Peak> peaks(idx.size());
  parallel_for(idx.size(), parallelism, [&](std::size_t p) {
    const std::size_t i = idx[p];
    Peak& pk = peaks[p];
    pk.prominence = peak_prominence(ys, i);
    pk.location = xs[i];
    pk.height = ys[i];
    pk.result = good[i]->result;
    auto consider = [&](double x) {
      PointResult r = evaluate_point(spec_at(x), plan.outputs);
      const double v = r.failed ? -std::numeric_limits<double>::infinity() : r.values[target];
      if (v > pk.height) {
        pk.height = v;
        pk.location = x;
        pk.result = std::move(r);
      }
      return v;
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = xs[i - 1], b = xs[i + 1];
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = consider(x1), f2 = consider(x2);
    for (int it = 0; it < plan.peaks.refine_iterations; ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + phi * (b - a);
        f2 = consider(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - phi * (b - a);
        f1 = consider(x1);
      }
    }
    double best = std::numeric_limits<double>::infinity();
    for (const auto& r : resonances) {
      const double d = std::abs(pk.location - r.location);
      if (d < best) {
        best = d;
        pk.nearest_level = r.level;
        pk.photon_order = r.order;
        pk.transition_energy = e(r.level);
      }
    }
  });

  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& a, const Peak& b) { return a.location < b.location; });
  for (auto& p : peaks) {
    if (!out.peaks.empty() && std::abs(out.peaks.back().location - p.location) <= 1e-9) {
      if (p.height > out.peaks.back().height) out.peaks.back() = std::move(p);
      continue;
    }
    out.peaks.push_back(std::move(p));
  }
  return out;
}

void write_csv(std::ostream& os, const SweepResult& result) {
  write_meta(os, result.meta);
  bool first = true;
  auto sep = [&] {
    if (!first) os << ',';
    first = false;
  };
  for (const auto& a : result.axis_names) sep(), os << a;
  for (const auto& o : result.output_names) sep(), os << o;
  os << ",converged,failed\n";
  for (const auto& r : result.rows) {
    first = true;
    for (double v : r.axes) sep(), os << fmt16(v);
    for (double v : r.result.values) sep(), os << fmt16(v);
    os << ',' << (r.result.converged ? 1 : 0) << ',' << (r.result.failed ? 1 : 0) << '\n';
  }
}

void write_json(std::ostream& os, const SweepResult& result) {
  nlohmann::ordered_json doc;
  doc["meta"] = meta_json(result.meta);
  auto cols = nlohmann::ordered_json::array();
  for (const auto& a : result.axis_names) cols.push_back(a);
  for (const auto& o : result.output_names) cols.push_back(o);
  doc["columns"] = cols;
  auto rows = nlohmann::ordered_json::array();
  for (const auto& r : result.rows) {
    nlohmann::ordered_json row;
    for (std::size_t i = 0; i < r.axes.size(); ++i) row[result.axis_names[i]] = r.axes[i];
    for (std::size_t i = 0; i < r.result.values.size(); ++i) {
      row[result.output_names[i]] = number_json(r.result.values[i]);
    }
    row["converged"] = r.result.converged;
    row["failed"] = r.result.failed;
    if (!r.result.message.empty()) row["message"] = r.result.message;
    rows.push_back(std::move(row));
  }
  doc["rows"] = std::move(rows);
  os << doc.dump(2) << '\n';
}

void write_peaks_csv(std::ostream& os, const SpectrumAnalysis& analysis) {
  write_meta(os, analysis.spectrum.meta);
  os << "# peak_target = " << analysis.target << '\n';
  os << "peak_location,height,prominence,nearest_level,photon_order,transition_energy";
  for (const auto& o : analysis.spectrum.output_names) os << ',' << o;
  os << ",converged\n";
  for (const auto& p : analysis.peaks) {
    os << fmt16(p.location) << ',' << fmt16(p.height) << ',' << fmt16(p.prominence) << ','
       << p.nearest_level << ',' << p.photon_order << ',' << fmt16(p.transition_energy);
    for (double v : p.result.values) os << ',' << fmt16(v);
    os << ',' << (p.result.converged ? 1 : 0) << '\n';
  }
}

void write_peaks_json(std::ostream& os, const SpectrumAnalysis& analysis) {
  nlohmann::ordered_json doc;
  auto meta = meta_json(analysis.spectrum.meta);
  meta["peak_target"] = analysis.target;
  doc["meta"] = std::move(meta);
  auto peaks = nlohmann::ordered_json::array();
  for (const auto& p : analysis.peaks) {
    nlohmann::ordered_json row;
    row["peak_location"] = p.location;
    row["height"] = number_json(p.height);
    row["prominence"] = number_json(p.prominence);
    row["nearest_level"] = p.nearest_level;
    row["photon_order"] = p.photon_order;
    row["transition_energy"] = p.transition_energy;
    for (std::size_t i = 0; i < p.result.values.size(); ++i) {
      row[analysis.spectrum.output_names[i]] = number_json(p.result.values[i]);
    }
    row["converged"] = p.result.converged;
    peaks.push_back(std::move(row));
  }
  doc["peaks"] = std::move(peaks);
  os << doc.dump(2) << '\n';
}

}  // namespace usc
