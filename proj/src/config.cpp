#include "usc/config.hpp"

#include "usc/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

namespace usc {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> plain_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return x;
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = s.find(sep, pos);
    out.emplace_back(trim(s.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

bool is_index(std::string_view s) {
  return !s.empty() && s.find_first_not_of("0123456789") == std::string_view::npos;
}

struct QubitFields {
  std::optional<double> g, omega_q, theta, delta, epsilon;
  int angle_line = 0;  // line of the last (omega_q, theta) key
  int gap_line = 0;    // line of the last (delta, epsilon) key
};

// Shared state while turning entries into a spec.
struct SpecBuilder {
  SystemSpec spec;
  QubitFields global;
  std::map<int, QubitFields> per_qubit;
  std::optional<int> count;
  int count_line = 0;
  std::optional<double> gamma_q_all;
  std::map<int, std::pair<double, int>> gamma_q;  // index -> (rate, line)
  bool have_probe = false, have_drive = false, have_modulation = false;
  ProbeSpec probe;
  DriveSpec drive;
  ModulationSpec modulation;
};

double number_at(const ConfigEntry& e) {
  try {
    return parse_number(e.value);
  } catch (const ConfigError& err) {
    throw ConfigError(err.detail(), e.line, e.key);
  }
}

int integer_at(const ConfigEntry& e, int lo) {
  const double x = number_at(e);
  if (x != std::floor(x) || x < lo || x > 1e6) {
    throw ConfigError("expected an integer >= " + std::to_string(lo), e.line, e.key);
  }
  return static_cast<int>(x);
}

bool set_qubit_field(QubitFields& q, const std::string& field, const ConfigEntry& e) {
  const double x = number_at(e);
  if (field == "g") {
    q.g = x;
  } else if (field == "omega_q") {
    q.omega_q = x;
    q.angle_line = e.line;
  } else if (field == "theta") {
    q.theta = x;
    q.angle_line = e.line;
  } else if (field == "delta") {
    q.delta = x;
    q.gap_line = e.line;
  } else if (field == "epsilon") {
    q.epsilon = x;
    q.gap_line = e.line;
  } else {
    return false;
  }
  return true;
}

// Returns false if the key is not a spec key.
bool apply_entry(SpecBuilder& b, const ConfigEntry& e) {
  const std::string& k = e.key;
  const auto parts = split(k, '.');
  if (k == "resonator.omega_c") {
    b.spec.resonator.omega_c = number_at(e);
  } else if (k == "numerics.cutoff") {
    b.spec.resonator.fock_cutoff = integer_at(e, 2);
  } else if (k == "qubits.count") {
    b.count = integer_at(e, 0);
    b.count_line = e.line;
  } else if (parts.size() == 2 && parts[0] == "qubits") {
    return set_qubit_field(b.global, parts[1], e);
  } else if (parts.size() == 3 && parts[0] == "qubit") {
    if (!is_index(parts[1])) throw ConfigError("qubit index must be a non-negative integer", e.line, k);
    const int j = std::stoi(parts[1]);
    if (j > 64) throw ConfigError("qubit index out of range", e.line, k);
    if (!set_qubit_field(b.per_qubit[j], parts[2], e)) return false;
  } else if (k == "probe.delta_prime") {
    b.have_probe = true;
    b.probe.gap_delta_prime = number_at(e);
  } else if (k == "probe.g_prime") {
    b.have_probe = true;
    b.probe.g_prime = number_at(e);
  } else if (k == "drive.amplitude") {
    b.have_drive = true;
    b.drive.amplitude = number_at(e);
  } else if (k == "drive.frequency") {
    b.have_drive = true;
    b.drive.frequency = number_at(e);
  } else if (k == "modulation.g0") {
    b.have_modulation = true;
    b.modulation.g0 = number_at(e);
  } else if (k == "modulation.g1") {
    b.have_modulation = true;
    b.modulation.g1 = number_at(e);
  } else if (k == "modulation.frequency") {
    b.have_modulation = true;
    b.modulation.frequency = number_at(e);
  } else if (k == "losses.gamma_c") {
    b.spec.losses.gamma_c = number_at(e);
  } else if (k == "losses.gamma_q") {
    b.gamma_q_all = number_at(e);
  } else if (parts.size() == 3 && parts[0] == "losses" && parts[1] == "gamma_q") {
    if (!is_index(parts[2])) throw ConfigError("qubit index must be a non-negative integer", e.line, k);
    b.gamma_q[std::stoi(parts[2])] = {number_at(e), e.line};
  } else if (k == "losses.gamma_probe") {
    b.spec.losses.gamma_probe = number_at(e);
  } else if (k == "numerics.dt") {
    b.spec.numerics.dt = number_at(e);
  } else if (k == "numerics.transient") {
    b.spec.numerics.transient = number_at(e);
  } else if (k == "numerics.window") {
    b.spec.numerics.window = number_at(e);
  } else if (k == "numerics.levels") {
    b.spec.numerics.levels = integer_at(e, 0);
  } else if (k == "numerics.level_window") {
    b.spec.numerics.level_window = number_at(e);
  } else {
    return false;
  }
  return true;
}

QubitSpec resolve_qubit(int j, const QubitFields& own, const QubitFields& global) {
  const std::string where = "qubit " + std::to_string(j);
  const bool own_gap = own.delta || own.epsilon;
  const bool own_angle = own.omega_q || own.theta;
  if (own_gap && own_angle) {
    throw ConfigError(where + " mixes (delta, epsilon) with (omega_q, theta)",
                      std::max(own.gap_line, own.angle_line));
  }
  const bool global_gap = global.delta || global.epsilon;
  const bool global_angle = global.omega_q || global.theta;
  if (global_gap && global_angle) {
    throw ConfigError("qubits.* mixes (delta, epsilon) with (omega_q, theta)",
                      std::max(global.gap_line, global.angle_line));
  }
  QubitSpec q;
  q.g = own.g.value_or(global.g.value_or(0.0));
  const bool use_gap = own_gap || (!own_angle && global_gap);
  if (use_gap) {
    const auto delta = own_gap ? own.delta : global.delta;
    const auto epsilon = own_gap ? own.epsilon : global.epsilon;
    if (!delta) throw ConfigError(where + " needs delta", own_gap ? own.gap_line : global.gap_line);
    q.gap_delta = *delta;
    q.flux_offset_energy = epsilon.value_or(0.0);
    return q;
  }
  const auto omega = own.omega_q ? own.omega_q : global.omega_q;
  const auto theta = own.theta ? own.theta : global.theta;
  if (!omega) {
    throw ConfigError(where + " needs omega_q (with theta) or delta (with epsilon)",
                      std::max(own.angle_line, global.angle_line));
  }
  return QubitSpec::from_frequency_angle(*omega, theta.value_or(0.0), q.g);
}

SystemSpec finish(SpecBuilder& b) {
  int n = b.count.value_or(0);
  const int highest = b.per_qubit.empty() ? -1 : b.per_qubit.rbegin()->first;
  if (b.count && highest >= n) {
    throw ConfigError("qubit " + std::to_string(highest) + " beyond qubits.count", b.count_line,
                      "qubits.count");
  }
  n = std::max(n, highest + 1);
  if (!b.count && n == 0 && (b.global.g || b.global.omega_q || b.global.delta)) n = 1;

  b.spec.qubits.clear();
  for (int j = 0; j < n; ++j) {
    const auto it = b.per_qubit.find(j);
    b.spec.qubits.push_back(resolve_qubit(j, it != b.per_qubit.end() ? it->second : QubitFields{},
                                          b.global));
  }
  b.spec.losses.gamma_q.assign(n, b.gamma_q_all.value_or(0.0));
  for (const auto& [j, rate] : b.gamma_q) {
    if (j >= n) {
      throw ConfigError("loss rate for a qubit that does not exist", rate.second,
                        "losses.gamma_q." + std::to_string(j));
    }
    b.spec.losses.gamma_q[j] = rate.first;
  }
  if (b.have_probe) b.spec.probe = b.probe;
  if (b.have_drive) b.spec.drive = b.drive;
  if (b.have_modulation) b.spec.modulation = b.modulation;
  try {
    b.spec.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what());
  }
  return b.spec;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

template <typename Fn>
auto with_path(const std::filesystem::path& path, Fn fn) {
  try {
    return fn(read_file(path));
  } catch (const ConfigError& e) {
    throw e.with_source(path.string());
  }
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<ConfigEntry> read_entries(std::istream& in) {
  std::vector<ConfigEntry> out;
  std::map<std::string, int> seen;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view s = raw;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key(trim(s.substr(0, eq)));
    const std::string value(trim(s.substr(eq + 1)));
    if (key.empty()) throw ConfigError("empty key", line);
    if (key.find_first_of(" \t") != std::string::npos) throw ConfigError("key contains spaces", line, key);
    if (value.empty()) throw ConfigError("missing value", line, key);
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError("duplicate key (first set on line " + std::to_string(it->second) + ")",
                        line, key);
    }
    seen[key] = line;
    out.push_back({key, value, line});
  }
  return out;
}

double parse_number(std::string_view text) {
  const std::string_view s = trim(text);
  if (auto x = plain_number(s)) return *x;
  // [factor*]pi[/divisor], with an optional leading sign
  const auto at = s.find("pi");
  if (at != std::string_view::npos) {
    std::string_view head = trim(s.substr(0, at));
    std::string_view tail = trim(s.substr(at + 2));
    double factor = 1.0;
    if (!head.empty() && head.back() == '*') {
      const auto f = plain_number(trim(head.substr(0, head.size() - 1)));
      if (!f) throw ConfigError("bad number '" + std::string(s) + "'");
      factor = *f;
    } else if (head == "-") {
      factor = -1.0;
    } else if (!head.empty() && head != "+") {
      throw ConfigError("bad number '" + std::string(s) + "'");
    }
    double divisor = 1.0;
    if (!tail.empty()) {
      const auto d = tail.front() == '/' ? plain_number(trim(tail.substr(1))) : std::nullopt;
      if (!d || *d == 0.0) throw ConfigError("bad number '" + std::string(s) + "'");
      divisor = *d;
    }
    return factor * std::numbers::pi / divisor;
  }
  throw ConfigError("bad number '" + std::string(s) + "'");
}

SystemSpec parse_spec(std::istream& in) {
  SpecBuilder b;
  for (const auto& e : read_entries(in)) {
    if (!apply_entry(b, e)) throw ConfigError("unknown key", e.line, e.key);
  }
  return finish(b);
}

SystemSpec parse_spec_text(const std::string& text) {
  std::istringstream in(text);
  return parse_spec(in);
}

SystemSpec load_spec(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& text) { return parse_spec_text(text); });
}

std::string serialize_spec(const SystemSpec& s) {
  std::ostringstream o;
  auto put = [&](const std::string& key, double v) { o << key << " = " << format_number(v) << '\n'; };
  put("resonator.omega_c", s.resonator.omega_c);
  o << "numerics.cutoff = " << s.resonator.fock_cutoff << '\n';
  o << "qubits.count = " << s.qubits.size() << '\n';
  for (std::size_t j = 0; j < s.qubits.size(); ++j) {
    const std::string p = "qubit." + std::to_string(j) + ".";
    put(p + "delta", s.qubits[j].gap_delta);
    put(p + "epsilon", s.qubits[j].flux_offset_energy);
    put(p + "g", s.qubits[j].g);
  }
  if (s.probe) {
    put("probe.delta_prime", s.probe->gap_delta_prime);
    put("probe.g_prime", s.probe->g_prime);
  }
  if (s.drive) {
    put("drive.amplitude", s.drive->amplitude);
    put("drive.frequency", s.drive->frequency);
  }
  if (s.modulation) {
    put("modulation.g0", s.modulation->g0);
    put("modulation.g1", s.modulation->g1);
    put("modulation.frequency", s.modulation->frequency);
  }
  put("losses.gamma_c", s.losses.gamma_c);
  for (std::size_t j = 0; j < s.losses.gamma_q.size(); ++j) {
    put("losses.gamma_q." + std::to_string(j), s.losses.gamma_q[j]);
  }
  put("losses.gamma_probe", s.losses.gamma_probe);
  put("numerics.dt", s.numerics.dt);
  put("numerics.transient", s.numerics.transient);
  put("numerics.window", s.numerics.window);
  o << "numerics.levels = " << s.numerics.levels << '\n';
  put("numerics.level_window", s.numerics.level_window);
  return o.str();
}

SweepPlan parse_plan(std::istream& in) {
  SpecBuilder b;
  SweepPlan plan;
  std::map<int, SweepAxis> axes;
  std::map<int, std::set<std::string>> axis_fields;
  std::map<int, int> axis_line;
  std::map<int, int> name_line;
  bool have_kind = false, have_outputs = false;
  int kind_line = 0;
  for (const auto& e : read_entries(in)) {
    if (apply_entry(b, e)) continue;
    const auto parts = split(e.key, '.');
    if (e.key == "sweep.kind") {
      try {
        plan.kind = sweep_kind_from_string(e.value);
      } catch (const InvalidSpec& err) {
        throw ConfigError(err.what(), e.line, e.key);
      }
      have_kind = true;
      kind_line = e.line;
    } else if (e.key == "sweep.outputs") {
      for (const auto& name : split(e.value, ',')) {
        if (!is_known_output(name)) throw ConfigError("unknown output '" + name + "'", e.line, e.key);
        plan.outputs.push_back(name);
      }
      have_outputs = true;
    } else if (parts.size() == 4 && parts[0] == "sweep" && parts[1] == "axis") {
      if (!is_index(parts[2]) || std::stoi(parts[2]) > 1) {
        throw ConfigError("axis index must be 0 or 1", e.line, e.key);
      }
      const int i = std::stoi(parts[2]);
      SweepAxis& a = axes[i];
      axis_line[i] = e.line;
      if (parts[3] == "name") {
        a.name = e.value;
        name_line[i] = e.line;
      } else if (parts[3] == "start") {
        a.start = number_at(e);
      } else if (parts[3] == "stop") {
        a.stop = number_at(e);
      } else if (parts[3] == "count") {
        a.count = integer_at(e, 2);
      } else {
        throw ConfigError("unknown key", e.line, e.key);
      }
      axis_fields[i].insert(parts[3]);
    } else if (parts.size() == 3 && parts[0] == "sweep" && parts[1] == "peaks") {
      PeakOptions& p = plan.peaks;
      if (parts[2] == "min_prominence") {
        p.min_prominence = number_at(e);
      } else if (parts[2] == "max_order") {
        p.max_order = integer_at(e, 1);
      } else if (parts[2] == "zoom_points") {
        p.zoom_points = integer_at(e, 0);
      } else if (parts[2] == "zoom_halfwidth") {
        p.zoom_halfwidth = number_at(e);
      } else if (parts[2] == "refine_iterations") {
        p.refine_iterations = integer_at(e, 0);
      } else {
        throw ConfigError("unknown key", e.line, e.key);
      }
    } else {
      throw ConfigError("unknown key", e.line, e.key);
    }
  }
  if (!have_kind) throw ConfigError("missing sweep.kind", 0, "sweep.kind");
  for (const auto& [i, fields] : axis_fields) {
    for (const char* f : {"name", "start", "stop", "count"}) {
      if (!fields.contains(f)) {
        throw ConfigError("axis " + std::to_string(i) + " lacks '" + f + "'", axis_line[i],
                          "sweep.axis." + std::to_string(i) + "." + f);
      }
    }
  }
  if (axes.contains(1) && !axes.contains(0)) throw ConfigError("axis 1 given without axis 0");
  for (auto& [i, a] : axes) plan.axes.push_back(a);
  plan.base = finish(b);
  for (const auto& [i, a] : axes) {
    SystemSpec trial = plan.base;
    if (!set_parameter(trial, a.name, a.start)) {
      throw ConfigError("'" + a.name + "' is not a sweepable parameter", name_line[i],
                        "sweep.axis." + std::to_string(i) + ".name");
    }
  }
  if (!have_outputs) plan.outputs = default_outputs(plan.kind);
  try {
    plan.validate();
  } catch (const InvalidSpec& e) {
    throw ConfigError(e.what(), have_outputs ? 0 : kind_line);
  }
  return plan;
}

SweepPlan parse_plan_text(const std::string& text) {
  std::istringstream in(text);
  return parse_plan(in);
}

SweepPlan load_plan(const std::filesystem::path& path) {
  return with_path(path, [](const std::string& text) { return parse_plan_text(text); });
}

std::string serialize_plan(const SweepPlan& plan) {
  std::ostringstream o;
  o << "sweep.kind = " << to_string(plan.kind) << '\n';
  for (std::size_t i = 0; i < plan.axes.size(); ++i) {
    const auto& a = plan.axes[i];
    const std::string p = "sweep.axis." + std::to_string(i) + ".";
    o << p << "name = " << a.name << '\n';
    o << p << "start = " << format_number(a.start) << '\n';
    o << p << "stop = " << format_number(a.stop) << '\n';
    o << p << "count = " << a.count << '\n';
  }
  o << "sweep.outputs = ";
  for (std::size_t i = 0; i < plan.outputs.size(); ++i) o << (i ? ", " : "") << plan.outputs[i];
  o << '\n';
  o << "sweep.peaks.min_prominence = " << format_number(plan.peaks.min_prominence) << '\n';
  o << "sweep.peaks.max_order = " << plan.peaks.max_order << '\n';
  o << "sweep.peaks.zoom_points = " << plan.peaks.zoom_points << '\n';
  o << "sweep.peaks.zoom_halfwidth = " << format_number(plan.peaks.zoom_halfwidth) << '\n';
  o << "sweep.peaks.refine_iterations = " << plan.peaks.refine_iterations << '\n';
  o << serialize_spec(plan.base);
  return o.str();
}

}  // namespace usc
