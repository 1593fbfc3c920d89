#pragma once

// Dressed-picture master equation at zero temperature:
//
//   d rho/dt = -i [H(t), rho] + sum_s sum_{j<k} Gamma_s^{jk} D[|j><k|] rho,
//   D[O] rho = O rho O^dagger - (O^dagger O rho + rho O^dagger O) / 2,
//   Gamma_s^{jk} = gamma_s ((omega_k - omega_j) / omega_s)^2 |<j|s + s^dagger|k>|^2.
//
// Jump operators live in the eigenbasis of the static Hamiltonian and are
// kept fixed while the drive or modulation acts. All dynamics run in dressed
// coordinates, restricted to the lowest `levels` eigenstates.

#include "usc/eigen.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace usc {

enum class ChannelSource { cavity, qubit, probe };

struct LindbladChannel {
  Index lower = 0;  // j
  Index upper = 0;  // k > j
  double rate = 0.0;
  ChannelSource source = ChannelSource::cavity;
  int qubit = -1;  // USC qubit index for ChannelSource::qubit

  // |j><k| in dressed coordinates of a space with `dim` levels.
  Operator jump(Index dim) const;
};

// Channels with |C_jk| below this are dropped.
inline constexpr double kChannelCouplingFloor = 1e-10;

std::vector<LindbladChannel> build_channels(const SystemSpec& spec, const EigenSystem& basis);

// Density matrix in dressed coordinates.
struct DensityMatrix {
  Operator value;

  static DensityMatrix pure_level(Index dim, Index level);
  static DensityMatrix from_state(const StateVector& psi);

  Index dim() const { return value.rows(); }
  double trace_error() const;       // |tr rho - 1|
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double purity() const;            // tr rho^2
  // Hermitian to 1e-10, trace 1 +- tol, smallest eigenvalue >= -tol.
  bool valid(double tol = 1e-8) const;
};

// Expectation value tr(rho O).
Complex expectation(const DensityMatrix& rho, const Operator& op);

// Everything the integrator needs, projected on the retained dressed levels.
class DressedFrame {
 public:
  explicit DressedFrame(const SystemSpec& spec);
  DressedFrame(const SystemSpec& spec, EigenSystem basis);

  const SystemSpec& spec() const { return spec_; }
  const EigenSystem& basis() const { return basis_; }
  const std::vector<LindbladChannel>& channels() const { return channels_; }

  Index levels() const { return levels_; }
  // Retained energies measured from the ground state.
  const Eigen::VectorXd& energies() const { return energies_; }
  double energy_span() const { return energies_(levels_ - 1); }
  // Aggregated Gamma_jk over every source, levels x levels (zero for j >= k).
  const Eigen::MatrixXd& rates() const { return rates_; }
  // sum_j Gamma_jk: total decay rate out of level k.
  const Eigen::VectorXd& decay_out() const { return decay_out_; }

  const Operator& modulation_term() const { return modulation_term_; }
  const Operator& drive_term() const { return drive_term_; }

  // U_M^dagger op U_M for a full-space (bare) operator.
  Operator project(const Operator& bare) const;
  DressedOperator decompose(const Operator& bare) const;

  // 0.02 / max(energy span, drive or modulation frequency).
  double max_stable_step() const;

 private:
  void setup();

  SystemSpec spec_;
  EigenSystem basis_;
  std::vector<LindbladChannel> channels_;
  Index levels_ = 0;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd rates_;
  Eigen::VectorXd decay_out_;
  Operator modulation_term_;
  Operator drive_term_;
};

// Number of dressed levels kept for a spec: numerics.levels when set,
// otherwise every level within the energy window above the ground state.
Index select_levels(const SystemSpec& spec, const Eigen::VectorXd& energies);

class MasterEquation {
 public:
  explicit MasterEquation(const DressedFrame& frame);

  Index dim() const { return energies_.size(); }

  // Time-dependent part of H(t) in dressed coordinates (the diagonal static
  // part is handled separately).
  Operator perturbation(double t) const;
  bool has_perturbation() const { return has_modulation_ || has_drive_; }

  // out = L(t) rho
  void apply(double t, const Operator& rho, Operator& out) const;
  void apply(const Operator& perturbation, bool perturbed, const Operator& rho,
             Operator& out) const;

  // One classical fourth-order Runge-Kutta step of size h.
  void step(double t, double h, Operator& rho) const;
  // Same step applied to every matrix of a batch sharing the time grid.
  void step(double t, double h, std::vector<Operator>& batch) const;

 private:
  const DressedFrame* frame_;
  Eigen::VectorXd energies_;
  Eigen::MatrixXd rates_;
  Eigen::VectorXd decay_out_;
  Operator modulation_term_;
  Operator drive_term_;
  bool has_modulation_ = false;
  bool has_drive_ = false;
  mutable std::vector<Operator> work_;
};

inline constexpr double kTraceDriftLimit = 1e-6;
inline constexpr double kNegativityLimit = -1e-6;

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
};

struct EvolveOptions {
  int sample_every = 1;             // record every n-th step (first and last always)
  int positivity_check_every = 0;   // 0: check at recorded samples only
};

// Fixed-step RK4 from t0 to t1. The step is dt, shrunk so that an integer
// number of steps spans the interval. dt must satisfy
// dt <= frame.max_stable_step().
Trajectory evolve(const DressedFrame& frame, const DensityMatrix& rho0, double t0, double t1,
                  double dt, const EvolveOptions& options = {});

// Same integration, streaming every step (including t0) to observer.
void evolve_observed(const DressedFrame& frame, const DensityMatrix& rho0, double t0, double t1,
                     double dt, const std::function<void(double, const Operator&)>& observer);

struct SteadyOptions {
  double transient = 0.0;       // 0: numerics.transient, then 10 / gamma_min
  double window_periods = 0.0;  // 0: numerics.window
  double dt = 0.0;              // 0: numerics.dt, capped by max_stable_step
  bool use_period_map = true;   // propagate the transient with the one-period map
};

struct SteadyResult {
  std::vector<double> averages;          // Re tr(rho O) averaged over the window
  std::vector<double> averages_doubled;  // same over twice the window
  Complex lockin{};                      // <tr(rho L) e^{i omega t}> over the window
  bool converged = true;                 // averages move < 1% when the window doubles
  double period = 0.0;
  double frequency = 0.0;
  double step = 0.0;
  long steps_per_period = 0;
  double transient = 0.0;
  long window_periods = 0;
  double max_trace_error = 0.0;
  double min_eigenvalue = 0.0;
};

// Periodic steady-state response starting from rho0 (default: dressed ground
// state). Observables and the lock-in operator are in dressed coordinates of
// the frame. The transient is rounded up to whole periods.
SteadyResult steady_state(const DressedFrame& frame, std::span<const Operator> observables,
                          const Operator* lockin = nullptr, const SteadyOptions& options = {},
                          const DensityMatrix* rho0 = nullptr);

struct SteadyValue {
  double value = 0.0;
  bool converged = true;
};

// Time average of tr(rho(t) O) for a bare (full-space) observable.
SteadyValue steady_response(const SystemSpec& spec, const Operator& observable,
                            double transient = 0.0, double window_periods = 0.0);

// Time series export: columns t, names...
void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          std::span<const std::string> names, std::span<const Operator> observables);

}  // namespace usc
