#include "usc/lindblad.hpp"

#include "usc/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>

namespace usc {

namespace {

constexpr Complex kI{0.0, 1.0};

double channel_frequency(const SystemSpec& spec, ChannelSource source, int qubit) {
  switch (source) {
    case ChannelSource::cavity:
      return spec.resonator.omega_c;
    case ChannelSource::qubit:
      return spec.qubits[static_cast<std::size_t>(qubit)].omega_q();
    case ChannelSource::probe:
      return spec.probe->gap_delta_prime;
  }
  return 1.0;
}

void append_channels(std::vector<LindbladChannel>& out, const EigenSystem& basis,
                     const Operator& coupling_bare, double gamma, double omega_s,
                     ChannelSource source, int qubit) {
  if (gamma <= 0.0) return;
  const Operator c = basis.to_dressed(coupling_bare);
  const Index n = basis.dim();
  for (Index k = 1; k < n; ++k) {
    for (Index j = 0; j < k; ++j) {
      const double magnitude = std::abs(c(j, k));
      if (magnitude < kChannelCouplingFloor) continue;
      const double gap = basis.energies(k) - basis.energies(j);
      const double rate = gamma * (gap / omega_s) * (gap / omega_s) * magnitude * magnitude;
      if (rate <= 0.0) continue;
      out.push_back({j, k, rate, source, qubit});
    }
  }
}

}  // namespace

Operator LindbladChannel::jump(Index dim) const {
  if (upper >= dim) throw DimensionMismatch("channel level outside the requested dimension");
  Operator o = Operator::Zero(dim, dim);
  o(lower, upper) = 1.0;
  return o;
}

std::vector<LindbladChannel> build_channels(const SystemSpec& spec, const EigenSystem& basis) {
  const SpaceLayout layout = spec.layout();
  if (basis.dim() != layout.total_dim()) {
    throw DimensionMismatch("eigenbasis does not match the spec's Hilbert space");
  }
  std::vector<LindbladChannel> out;
  append_channels(out, basis, quadrature(layout), spec.losses.gamma_c,
                  channel_frequency(spec, ChannelSource::cavity, -1), ChannelSource::cavity, -1);
  for (int j = 0; j < static_cast<int>(spec.qubits.size()); ++j) {
    const double gamma = spec.losses.qubit_rate(j);
    if (gamma <= 0.0) continue;
    append_channels(out, basis, pauli(layout, j, PauliAxis::x), gamma,
                    channel_frequency(spec, ChannelSource::qubit, j), ChannelSource::qubit, j);
  }
  if (spec.probe && spec.losses.gamma_probe > 0.0) {
    append_channels(out, basis, pauli(layout, layout.probe_index(), PauliAxis::x),
                    spec.losses.gamma_probe, channel_frequency(spec, ChannelSource::probe, -1),
                    ChannelSource::probe, -1);
  }
  return out;
}

DensityMatrix DensityMatrix::pure_level(Index dim, Index level) {
  if (level < 0 || level >= dim) throw DimensionMismatch("level outside the density matrix");
  DensityMatrix rho{Operator::Zero(dim, dim)};
  rho.value(level, level) = 1.0;
  return rho;
}

DensityMatrix DensityMatrix::from_state(const StateVector& psi) {
  const StateVector n = psi / psi.norm();
  return DensityMatrix{n * n.adjoint()};
}

double DensityMatrix::trace_error() const { return std::abs(value.trace() - Complex(1.0)); }

double DensityMatrix::hermiticity_error() const { return usc::hermiticity_error(value); }

double DensityMatrix::min_eigenvalue() const {
  const Operator h = 0.5 * (value + value.adjoint());
  Eigen::SelfAdjointEigenSolver<Operator> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

double DensityMatrix::purity() const { return (value * value).trace().real(); }

bool DensityMatrix::valid(double tol) const {
  return hermiticity_error() <= 1e-10 && trace_error() <= tol && min_eigenvalue() >= -tol;
}

Complex expectation(const DensityMatrix& rho, const Operator& op) {
  if (op.rows() != rho.dim() || op.cols() != rho.dim()) {
    throw DimensionMismatch("observable and density matrix dimensions differ");
  }
  return (rho.value.cwiseProduct(op.transpose())).sum();
}

Index select_levels(const SystemSpec& spec, const Eigen::VectorXd& energies) {
  const Index n = energies.size();
  if (spec.numerics.levels > 0) return std::min<Index>(spec.numerics.levels, n);
  const double window = spec.numerics.level_window > 0.0
                            ? spec.numerics.level_window
                            : max_drive_frequency(spec) + 1.0 * spec.resonator.omega_c;
  Index m = 0;
  while (m < n && energies(m) - energies(0) <= window) ++m;
  m = std::max<Index>(m, std::min<Index>(2, n));
  // Never split a degenerate cluster.
  while (m < n && energies(m) - energies(m - 1) < kDegeneracyWindow) ++m;
  return m;
}

DressedFrame::DressedFrame(const SystemSpec& spec) : spec_(spec) {
  spec_.validate();
  basis_ = diagonalize_spec(spec_);
  setup();
}

DressedFrame::DressedFrame(const SystemSpec& spec, EigenSystem basis)
    : spec_(spec), basis_(std::move(basis)) {
  spec_.validate();
  setup();
}

void DressedFrame::setup() {
  channels_ = build_channels(spec_, basis_);
  levels_ = select_levels(spec_, basis_.energies);
  energies_ = basis_.energies.head(levels_).array() - basis_.energies(0);

  rates_ = Eigen::MatrixXd::Zero(levels_, levels_);
  for (const auto& ch : channels_) {
    if (ch.upper < levels_) rates_(ch.lower, ch.upper) += ch.rate;
  }
  decay_out_ = rates_.colwise().sum().transpose();

  if (spec_.modulation && spec_.modulation->g1 != 0.0) {
    modulation_term_ = project(usc_coupling_hamiltonian(spec_));
  }
  if (spec_.drive && spec_.drive->amplitude != 0.0) {
    drive_term_ = project(drive_operator(spec_));
  }
}

Operator DressedFrame::project(const Operator& bare) const {
  const Index n = basis_.dim();
  if (bare.rows() != n || bare.cols() != n) {
    throw DimensionMismatch("bare operator does not match the spec's Hilbert space");
  }
  const auto u = basis_.states.leftCols(levels_);
  return u.adjoint() * bare * u;
}

DressedOperator DressedFrame::decompose(const Operator& bare) const {
  return dressed_decompose(bare, basis_).truncated(levels_);
}

double DressedFrame::max_stable_step() const {
  const double fastest = std::max({energy_span(), max_drive_frequency(spec_), 1e-12});
  return 0.02 / fastest;
}

MasterEquation::MasterEquation(const DressedFrame& frame)
    : frame_(&frame),
      energies_(frame.energies()),
      rates_(frame.rates()),
      decay_out_(frame.decay_out()),
      modulation_term_(frame.modulation_term()),
      drive_term_(frame.drive_term()) {
  has_modulation_ = modulation_term_.size() > 0;
  has_drive_ = drive_term_.size() > 0;
}

Operator MasterEquation::perturbation(double t) const {
  const Index m = dim();
  Operator p = Operator::Zero(m, m);
  if (has_modulation_) p += modulation_factor(frame_->spec(), t) * modulation_term_;
  if (has_drive_) p += drive_field(frame_->spec(), t) * drive_term_;
  return p;
}

void MasterEquation::apply(const Operator& perturbation, bool perturbed, const Operator& rho,
                           Operator& out) const {
  const Index m = dim();
  out.resize(m, m);
  for (Index b = 0; b < m; ++b) {
    for (Index a = 0; a < m; ++a) {
      const Complex factor(-0.5 * (decay_out_(a) + decay_out_(b)), -(energies_(a) - energies_(b)));
      out(a, b) = factor * rho(a, b);
    }
  }
  // Population feed j <- k from every downward channel.
  for (Index k = 1; k < m; ++k) {
    const Complex pk = rho(k, k);
    if (pk == Complex(0.0)) continue;
    for (Index j = 0; j < k; ++j) {
      const double r = rates_(j, k);
      if (r != 0.0) out(j, j) += r * pk;
    }
  }
  if (perturbed) {
    out.noalias() -= kI * (perturbation * rho);
    out.noalias() += kI * (rho * perturbation);
  }
}

void MasterEquation::apply(double t, const Operator& rho, Operator& out) const {
  if (has_perturbation()) {
    apply(perturbation(t), true, rho, out);
  } else {
    apply(Operator(), false, rho, out);
  }
}

void MasterEquation::step(double t, double h, Operator& rho) const {
  const bool perturbed = has_perturbation();
  Operator p0, p1, p2;
  if (perturbed) {
    p0 = perturbation(t);
    p1 = perturbation(t + 0.5 * h);
    p2 = perturbation(t + h);
  }
  work_.resize(5);
  auto& k1 = work_[0];
  auto& k2 = work_[1];
  auto& k3 = work_[2];
  auto& k4 = work_[3];
  auto& tmp = work_[4];
  apply(p0, perturbed, rho, k1);
  tmp = rho + (0.5 * h) * k1;
  apply(p1, perturbed, tmp, k2);
  tmp = rho + (0.5 * h) * k2;
  apply(p1, perturbed, tmp, k3);
  tmp = rho + h * k3;
  apply(p2, perturbed, tmp, k4);
  rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void MasterEquation::step(double t, double h, std::vector<Operator>& batch) const {
  const bool perturbed = has_perturbation();
  Operator p0, p1, p2;
  if (perturbed) {
    p0 = perturbation(t);
    p1 = perturbation(t + 0.5 * h);
    p2 = perturbation(t + h);
  }
  Operator k, acc, tmp;
  for (auto& rho : batch) {
    apply(p0, perturbed, rho, k);
    acc = k;
    tmp = rho + (0.5 * h) * k;
    apply(p1, perturbed, tmp, k);
    acc += 2.0 * k;
    tmp = rho + (0.5 * h) * k;
    apply(p1, perturbed, tmp, k);
    acc += 2.0 * k;
    tmp = rho + h * k;
    apply(p2, perturbed, tmp, k);
    acc += k;
    rho += (h / 6.0) * acc;
  }
}

namespace {

long step_count(double span, double dt) {
  return std::max(1L, static_cast<long>(std::ceil(span / dt - 1e-9)));
}

void check_dt(const DressedFrame& frame, double dt) {
  if (!(dt > 0.0)) throw InvalidSpec("time step must be > 0");
  const double bound = frame.max_stable_step();
  if (dt > bound * (1.0 + 1e-12)) {
    throw InvalidSpec("time step " + std::to_string(dt) + " exceeds 0.02 / fastest frequency = " +
                      std::to_string(bound));
  }
}

[[noreturn]] void integration_failure(const std::string& what, double t, double value) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%s at t = %.6g (value %.3e)", what.c_str(), t, value);
  throw IntegrationFailure(buf);
}

void check_trace(const Operator& rho, double t) {
  const double drift = std::abs(rho.trace() - Complex(1.0));
  if (!(drift <= kTraceDriftLimit)) integration_failure("trace drift", t, drift);
}

void check_positivity(const Operator& rho, double t) {
  const double lowest = DensityMatrix{rho}.min_eigenvalue();
  if (!(lowest >= kNegativityLimit)) integration_failure("density matrix negativity", t, lowest);
}

}  // namespace

void evolve_observed(const DressedFrame& frame, const DensityMatrix& rho0, double t0, double t1,
                     double dt, const std::function<void(double, const Operator&)>& observer) {
  if (rho0.dim() != frame.levels()) {
    throw DimensionMismatch("initial state has " + std::to_string(rho0.dim()) +
                            " levels, frame keeps " + std::to_string(frame.levels()));
  }
  check_dt(frame, dt);
  const MasterEquation eq(frame);
  const long n = step_count(t1 - t0, dt);
  const double h = (t1 - t0) / static_cast<double>(n);
  Operator rho = rho0.value;
  observer(t0, rho);
  for (long s = 0; s < n; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    eq.step(t, h, rho);
    check_trace(rho, t + h);
    observer(t + h, rho);
  }
  check_positivity(rho, t1);
}

Trajectory evolve(const DressedFrame& frame, const DensityMatrix& rho0, double t0, double t1,
                  double dt, const EvolveOptions& options) {
  if (rho0.dim() != frame.levels()) {
    throw DimensionMismatch("initial state has " + std::to_string(rho0.dim()) +
                            " levels, frame keeps " + std::to_string(frame.levels()));
  }
  check_dt(frame, dt);
  const MasterEquation eq(frame);
  const long n = step_count(t1 - t0, dt);
  const double h = (t1 - t0) / static_cast<double>(n);
  const int every = std::max(1, options.sample_every);

  Trajectory traj;
  Operator rho = rho0.value;
  traj.times.push_back(t0);
  traj.states.push_back(DensityMatrix{rho});
  for (long s = 0; s < n; ++s) {
    const double t = t0 + static_cast<double>(s) * h;
    eq.step(t, h, rho);
    check_trace(rho, t + h);
    const bool last = s + 1 == n;
    if (options.positivity_check_every > 0 && (s + 1) % options.positivity_check_every == 0) {
      check_positivity(rho, t + h);
    }
    if ((s + 1) % every == 0 || last) {
      if (options.positivity_check_every == 0) check_positivity(rho, t + h);
      traj.times.push_back(last ? t1 : t + h);
      traj.states.push_back(DensityMatrix{rho});
    }
  }
  return traj;
}

namespace {

struct Periodicity {
  double frequency = 0.0;
  bool single_frequency = true;
};

Periodicity periodicity_of(const SystemSpec& spec) {
  double wm = 0.0;
  double wd = 0.0;
  if (spec.modulation && spec.modulation->g1 != 0.0) wm = spec.modulation->frequency;
  if (spec.drive && spec.drive->amplitude != 0.0) wd = spec.drive->frequency;
  Periodicity p;
  if (wm > 0.0 && wd > 0.0 && std::abs(wm - wd) > 1e-12 * std::max(wm, wd)) {
    p.single_frequency = false;
    p.frequency = std::max(wm, wd);
  } else {
    p.frequency = std::max(wm, wd);
  }
  return p;
}

Eigen::VectorXcd vectorize(const Operator& m) {
  return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Operator unvectorize(const Eigen::VectorXcd& v, Index dim) {
  return Eigen::Map<const Operator>(v.data(), dim, dim);
}

// Matrix of the discrete RK4 map over one period acting on vec(rho).
Operator one_period_map(const MasterEquation& eq, Index m, double t0, double h, long steps) {
  // Images of E_ab with a <= b; E_ba follows by Hermitian conjugation since
  // the Lindbladian commutes with the adjoint.
  std::vector<Operator> batch;
  std::vector<std::pair<Index, Index>> labels;
  for (Index b = 0; b < m; ++b) {
    for (Index a = 0; a <= b; ++a) {
      Operator e = Operator::Zero(m, m);
      e(a, b) = 1.0;
      batch.push_back(std::move(e));
      labels.emplace_back(a, b);
    }
  }
  for (long s = 0; s < steps; ++s) eq.step(t0 + static_cast<double>(s) * h, h, batch);

  Operator map(m * m, m * m);
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto [a, b] = labels[i];
    map.col(a + m * b) = vectorize(batch[i]);
    if (a != b) map.col(b + m * a) = vectorize(Operator(batch[i].adjoint()));
  }
  return map;
}

Eigen::VectorXcd apply_power(Operator map, long power, Eigen::VectorXcd v) {
  while (power > 0) {
    if (power & 1L) v = map * v;
    power >>= 1;
    if (power > 0) map = map * map;
  }
  return v;
}

}  // namespace

SteadyResult steady_state(const DressedFrame& frame, std::span<const Operator> observables,
                          const Operator* lockin, const SteadyOptions& options,
                          const DensityMatrix* rho0) {
  const SystemSpec& spec = frame.spec();
  const Index m = frame.levels();
  for (const auto& o : observables) {
    if (o.rows() != m || o.cols() != m) throw DimensionMismatch("observable is not levels x levels");
  }
  if (lockin != nullptr && (lockin->rows() != m || lockin->cols() != m)) {
    throw DimensionMismatch("lock-in operator is not levels x levels");
  }
  const MasterEquation eq(frame);
  const Periodicity per = periodicity_of(spec);

  SteadyResult r;
  r.frequency = per.frequency;
  r.period = per.frequency > 0.0 ? 2.0 * std::numbers::pi / per.frequency
                                 : 2.0 * std::numbers::pi / spec.resonator.omega_c;

  const double cap = frame.max_stable_step();
  double dt = options.dt > 0.0 ? options.dt : (spec.numerics.dt > 0.0 ? spec.numerics.dt : cap);
  dt = std::min(dt, cap);
  r.steps_per_period = step_count(r.period, dt);
  r.step = r.period / static_cast<double>(r.steps_per_period);

  double transient = options.transient > 0.0 ? options.transient : spec.numerics.transient;
  if (transient <= 0.0) {
    const double gmin = spec.losses.min_positive_rate();
    transient = gmin > 0.0 ? 10.0 / gmin : 0.0;
  }
  const long transient_periods =
      transient > 0.0 ? static_cast<long>(std::ceil(transient / r.period - 1e-9)) : 0L;
  r.transient = static_cast<double>(transient_periods) * r.period;

  const double wp = options.window_periods > 0.0 ? options.window_periods : spec.numerics.window;
  r.window_periods = std::max(1L, static_cast<long>(std::ceil(wp - 1e-9)));

  Operator rho = rho0 != nullptr ? rho0->value : DensityMatrix::pure_level(m, 0).value;
  if (rho.rows() != m) throw DimensionMismatch("initial state does not match the frame");

  const long n = r.steps_per_period;
  const double h = r.step;
  if (transient_periods > 0) {
    const bool map_pays_off = per.single_frequency && options.use_period_map &&
                              transient_periods > static_cast<long>(m * m);
    if (map_pays_off) {
      const Operator map = one_period_map(eq, m, 0.0, h, n);
      rho = unvectorize(apply_power(map, transient_periods, vectorize(rho)), m);
      rho = 0.5 * (rho + rho.adjoint()).eval();
      check_trace(rho, r.transient);
    } else {
      const long total = transient_periods * n;
      for (long s = 0; s < total; ++s) {
        // Time measured within the period keeps the phase exact.
        const double t = static_cast<double>(s % n) * h;
        eq.step(t, h, rho);
        if ((s + 1) % n == 0) check_trace(rho, static_cast<double>((s + 1) / n) * r.period);
      }
    }
  }
  check_positivity(rho, r.transient);

  const std::size_t nobs = observables.size();
  std::vector<Operator> transposed(nobs);
  for (std::size_t i = 0; i < nobs; ++i) transposed[i] = observables[i].transpose();
  const Operator lockin_t = lockin != nullptr ? Operator(lockin->transpose()) : Operator();

  std::vector<Complex> sum_first(nobs), sum_all(nobs);
  Complex lock_first{}, lock_all{};
  r.min_eigenvalue = DensityMatrix{rho}.min_eigenvalue();
  const long window_steps = r.window_periods * n;
  for (long s = 0; s < 2 * window_steps; ++s) {
    const long phase_step = s % n;
    const double t = static_cast<double>(phase_step) * h;
    const bool first = s < window_steps;
    for (std::size_t i = 0; i < nobs; ++i) {
      const Complex v = rho.cwiseProduct(transposed[i]).sum();
      sum_all[i] += v;
      if (first) sum_first[i] += v;
    }
    if (lockin != nullptr) {
      const Complex v = rho.cwiseProduct(lockin_t).sum() *
                        std::exp(Complex(0.0, per.frequency * t));
      lock_all += v;
      if (first) lock_first += v;
    }
    eq.step(t, h, rho);
    const double drift = std::abs(rho.trace() - Complex(1.0));
    r.max_trace_error = std::max(r.max_trace_error, drift);
    if (!(drift <= kTraceDriftLimit)) integration_failure("trace drift", r.transient + t, drift);
    if ((s + 1) % n == 0) {
      const double lowest = DensityMatrix{rho}.min_eigenvalue();
      r.min_eigenvalue = std::min(r.min_eigenvalue, lowest);
      if (!(lowest >= kNegativityLimit)) {
        integration_failure("density matrix negativity", r.transient + t, lowest);
      }
    }
  }

  const double n1 = static_cast<double>(window_steps);
  const double n2 = 2.0 * n1;
  auto close = [](double a, double b) { return std::abs(a - b) <= 0.01 * std::abs(b) + 1e-14; };
  r.averages.resize(nobs);
  r.averages_doubled.resize(nobs);
  for (std::size_t i = 0; i < nobs; ++i) {
    r.averages[i] = sum_first[i].real() / n1;
    r.averages_doubled[i] = sum_all[i].real() / n2;
    if (!close(r.averages[i], r.averages_doubled[i])) r.converged = false;
  }
  if (lockin != nullptr) {
    r.lockin = lock_first / n1;
    if (!close(std::abs(r.lockin), std::abs(lock_all / n2))) r.converged = false;
  }
  return r;
}

SteadyValue steady_response(const SystemSpec& spec, const Operator& observable, double transient,
                            double window_periods) {
  const DressedFrame frame(spec);
  const Operator o = frame.project(observable);
  SteadyOptions opts;
  opts.transient = transient;
  opts.window_periods = window_periods;
  const SteadyResult r = steady_state(frame, std::span<const Operator>(&o, 1), nullptr, opts);
  return {r.averages[0], r.converged};
}

void write_trajectory_csv(std::ostream& os, const Trajectory& trajectory,
                          std::span<const std::string> names,
                          std::span<const Operator> observables) {
  if (names.size() != observables.size()) {
    throw DimensionMismatch("one column name per observable required");
  }
  os << "t";
  for (const auto& n : names) os << ',' << n;
  os << '\n';
  char buf[64];
  for (std::size_t s = 0; s < trajectory.times.size(); ++s) {
    std::snprintf(buf, sizeof buf, "%.16e", trajectory.times[s]);
    os << buf;
    for (const auto& o : observables) {
      std::snprintf(buf, sizeof buf, "%.16e", expectation(trajectory.states[s], o).real());
      os << ',' << buf;
    }
    os << '\n';
  }
}

}  // namespace usc
