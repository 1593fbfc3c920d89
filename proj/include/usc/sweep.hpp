#pragma once

// Declarative parameter sweeps over a base SystemSpec, run on a worker pool.
// Rows always come back in axis order (first axis slowest), whatever the
// number of workers.

#include "usc/model.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace usc {

enum class SweepKind { vev_contour, emission_spectrum, absorption_spectrum, custom_scalar };

std::string to_string(SweepKind kind);
SweepKind sweep_kind_from_string(const std::string& name);  // throws InvalidSpec

// Linear range start..stop with `count` points, both ends included.
struct SweepAxis {
  std::string name;
  double start = 0.0;
  double stop = 0.0;
  int count = 2;

  double value(int i) const;
  bool operator==(const SweepAxis&) const = default;
};

struct PeakOptions {
  double min_prominence = 0.0;  // 0: 1e-3 of the coarse spectrum's range
  int max_order = 2;            // multi-photon orders probed when zooming
  int zoom_points = 25;         // points per zoom window; 0 disables zooming
  double zoom_halfwidth = 0.0;  // 0: 12 linewidths of the target transition
  int refine_iterations = 18;   // golden-section steps per peak

  bool operator==(const PeakOptions&) const = default;
};

struct SweepPlan {
  SweepKind kind = SweepKind::custom_scalar;
  std::vector<SweepAxis> axes;
  SystemSpec base;
  std::vector<std::string> outputs;
  PeakOptions peaks;

  // Throws InvalidSpec: 1-2 axes, count >= 2, known parameter and output
  // names, outputs computable for the base spec.
  void validate() const;
  std::size_t point_count() const;
  // Spec at the flat row index (first axis slowest).
  SystemSpec point_spec(std::size_t row) const;
  std::vector<double> point_axes(std::size_t row) const;

  bool operator==(const SweepPlan&) const = default;
};

// Names accepted in SweepPlan::outputs.
const std::vector<std::string>& output_catalog();
bool is_known_output(const std::string& name);
// Outputs that need the time-dependent master equation.
bool is_dynamic_output(const std::string& name);
std::vector<std::string> default_outputs(SweepKind kind);

// Sets a sweepable parameter (a config key such as qubits.theta or
// drive.frequency). Returns false for unknown names. Angles hold omega_q
// fixed by adjusting Delta and epsilon together.
bool set_parameter(SystemSpec& spec, const std::string& name, double value);

struct PointResult {
  std::vector<double> values;
  bool converged = true;
  bool failed = false;
  std::string message;
};

// Every requested output at a single spec. usc::Error is caught and turned
// into a failed result.
PointResult evaluate_point(const SystemSpec& spec, std::span<const std::string> outputs);

struct SweepRow {
  std::vector<double> axes;
  PointResult result;
};

struct SweepResult {
  std::vector<std::string> axis_names;
  std::vector<std::string> output_names;
  std::vector<SweepRow> rows;
  std::vector<std::pair<std::string, std::string>> meta;

  std::size_t failures() const;
  std::size_t unconverged() const;
  double failure_fraction() const;
  // Index of an output column, throws InvalidSpec if absent.
  std::size_t output_index(const std::string& name) const;
  std::vector<double> column(const std::string& name) const;
  std::vector<double> axis_column(std::size_t axis) const;
};

// Sweeps with more than this fraction of failed rows are a physics failure.
inline constexpr double kMaxFailureFraction = 0.10;

// Fixes an automatic level window for the whole plan so that every row
// integrates the same dressed levels.
SweepPlan with_uniform_levels(SweepPlan plan);

SweepResult run_plan(const SweepPlan& plan, int parallelism = 1);

// Runs fn(i) for i in [0, n) on `parallelism` threads.
void parallel_for(std::size_t n, int parallelism, const std::function<void(std::size_t)>& fn);

// Indices of local maxima whose topographic prominence is at least
// min_prominence. Plateaus report their first index.
std::vector<std::size_t> find_peaks(std::span<const double> y, double min_prominence);
double peak_prominence(std::span<const double> y, std::size_t i);

struct Peak {
  double location = 0.0;
  double height = 0.0;      // target output at the refined location
  double prominence = 0.0;  // on the sampled spectrum
  int nearest_level = 0;    // dressed level k of the closest resonance (E_k - E_0) / n
  int photon_order = 1;     // n
  double transition_energy = 0.0;  // E_k - E_0
  PointResult result;       // every output at the refined location
};

struct SpectrumAnalysis {
  SweepResult spectrum;  // coarse grid plus zoom points, sorted by frequency
  std::string target;    // output used for peak detection
  std::vector<Peak> peaks;
};

// One-axis frequency plan: coarse sweep, zoom windows around dressed
// multi-photon resonances, peak detection on the merged samples, then
// golden-section refinement of each maximum.
SpectrumAnalysis analyze_spectrum(const SweepPlan& plan, int parallelism = 1);

void write_csv(std::ostream& os, const SweepResult& result);
void write_json(std::ostream& os, const SweepResult& result);
void write_peaks_csv(std::ostream& os, const SpectrumAnalysis& analysis);
void write_peaks_json(std::ostream& os, const SpectrumAnalysis& analysis);

}  // namespace usc
