#pragma once

// Flat "key = value" config files. '#' starts a comment, blank lines are
// ignored, every key appears at most once.
//
//   resonator.omega_c            numerics.cutoff
//   qubits.count                 qubits.{g, omega_q, theta, delta, epsilon}
//   qubit.N.{g, omega_q, theta, delta, epsilon}     (N counts from 0)
//   probe.{delta_prime, g_prime}
//   drive.{amplitude, frequency}
//   modulation.{g0, g1, frequency}
//   losses.{gamma_c, gamma_q, gamma_q.N, gamma_probe}
//   numerics.{dt, transient, window, levels, level_window}
//
// A qubit is given either by (omega_q, theta) or by (delta, epsilon);
// qubit.N keys override the qubits.* defaults. Sweep plans add
//
//   sweep.kind, sweep.outputs (comma separated)
//   sweep.axis.I.{name, start, stop, count}        (I = 0 or 1)
//   sweep.peaks.{min_prominence, max_order, zoom_points, zoom_halfwidth, refine_iterations}
//
// Numbers accept pi in the forms pi, pi/4, 0.5*pi, 3*pi/8.

#include "usc/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace usc {

struct ConfigEntry {
  std::string key;
  std::string value;
  int line = 0;
};

// Throws ConfigError for malformed lines and repeated keys.
std::vector<ConfigEntry> read_entries(std::istream& in);

// Throws ConfigError (no line information) on bad input.
double parse_number(std::string_view text);

SystemSpec parse_spec(std::istream& in);
SystemSpec parse_spec_text(const std::string& text);
SystemSpec load_spec(const std::filesystem::path& path);
// Every field at full precision; parse_spec_text(serialize_spec(s)) == s
// for any s produced by the parser.
std::string serialize_spec(const SystemSpec& spec);

SweepPlan parse_plan(std::istream& in);
SweepPlan parse_plan_text(const std::string& text);
SweepPlan load_plan(const std::filesystem::path& path);
std::string serialize_plan(const SweepPlan& plan);

std::string format_number(double x);  // %.17g

}  // namespace usc
