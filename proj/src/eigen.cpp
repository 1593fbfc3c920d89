#include "usc/eigen.hpp"

#include "usc/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace usc {

Operator EigenSystem::to_dressed(const Operator& op) const {
  if (op.rows() != dim() || op.cols() != dim()) {
    throw DimensionMismatch("operator dimension does not match the eigenbasis");
  }
  return states.adjoint() * op * states;
}

Operator EigenSystem::to_bare(const Operator& dressed) const {
  if (dressed.rows() != dim() || dressed.cols() != dim()) {
    throw DimensionMismatch("operator dimension does not match the eigenbasis");
  }
  return states * dressed * states.adjoint();
}

void fix_gauge(EigenSystem& es) {
  for (Index j = 0; j < es.states.cols(); ++j) {
    auto col = es.states.col(j);
    const double largest = col.cwiseAbs().maxCoeff();
    if (largest == 0.0) continue;
    // First component within round-off of the maximum, so near-ties resolve
    // the same way no matter which phase the solver handed back.
    Index pivot = 0;
    for (Index i = 0; i < col.size(); ++i) {
      if (std::abs(col(i)) >= largest * (1.0 - 1e-9)) {
        pivot = i;
        break;
      }
    }
    const Complex phase = std::conj(col(pivot)) / std::abs(col(pivot));
    col *= phase;
    col(pivot) = Complex(col(pivot).real(), 0.0);
  }
}

namespace {

void check_hermitian(const Operator& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("cannot diagonalize a non-square operator");
  const double scale = std::max(1.0, max_abs(h));
  const double err = hermiticity_error(h);
  if (err > 1e-10 * scale) {
    throw NotHermitian("operator is not Hermitian (max |H - H^dagger| = " + std::to_string(err) +
                       ")");
  }
}

EigenSystem solve(const Operator& h) {
  EigenSystem es;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) throw Error("eigensolver failed to converge");
    es.energies = solver.eigenvalues();
    es.states = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<Operator> solver(h);
    if (solver.info() != Eigen::Success) throw Error("eigensolver failed to converge");
    es.energies = solver.eigenvalues();
    es.states = solver.eigenvectors();
  }
  return es;
}

void resolve_degeneracies_by_parity(EigenSystem& es, const Operator& parity) {
  const Index n = es.dim();
  Index start = 0;
  while (start < n) {
    Index stop = start + 1;
    while (stop < n && es.energies(stop) - es.energies(stop - 1) < kDegeneracyWindow) ++stop;
    const Index size = stop - start;
    if (size > 1) {
      const Operator block = es.states.middleCols(start, size);
      const Operator projected = block.adjoint() * parity * block;
      Eigen::SelfAdjointEigenSolver<Operator> solver(0.5 * (projected + projected.adjoint()));
      // Even states first.
      const Operator rotation = solver.eigenvectors().rowwise().reverse();
      es.states.middleCols(start, size) = block * rotation;
    }
    start = stop;
  }
}

}  // namespace

EigenSystem diagonalize(const Operator& h, const Operator* parity) {
  check_hermitian(h);
  EigenSystem es = solve(h);
  if (parity != nullptr) {
    if (parity->rows() != h.rows() || parity->cols() != h.cols()) {
      throw DimensionMismatch("parity operator dimension does not match the Hamiltonian");
    }
    const double scale = std::max(1.0, max_abs(h));
    if (max_abs(commutator(h, *parity)) < 1e-12 * scale) {
      resolve_degeneracies_by_parity(es, *parity);
    }
  }
  fix_gauge(es);
  return es;
}

EigenSystem diagonalize_spec(const SystemSpec& spec) {
  const Operator h = build_static_hamiltonian(spec);
  const Operator parity = parity_operator(spec.layout());
  return diagonalize(h, &parity);
}

GroundProperties ground_properties(const SystemSpec& spec) {
  const EigenSystem es = diagonalize_spec(spec);
  const SpaceLayout layout = spec.layout();
  const StateVector g = es.ground();
  const Operator a = annihilation(layout);

  GroundProperties out;
  out.energy = es.energies(0);
  out.field_amplitude = g.dot(a * g);  // dot conjugates the left argument
  out.vev = g.dot(quadrature(layout) * g).real();
  out.photon_number = std::max(0.0, (a * g).squaredNorm());
  return out;
}

double ground_vev(const SystemSpec& spec) { return ground_properties(spec).vev; }

double ground_photon_number(const SystemSpec& spec) {
  return ground_properties(spec).photon_number;
}

double first_order_coherence(const SystemSpec& spec) {
  const GroundProperties gp = ground_properties(spec);
  if (gp.photon_number < 1e-300) return 1.0;
  return std::norm(gp.field_amplitude) / gp.photon_number;
}

DressedOperator DressedOperator::truncated(Index n) const {
  if (n > dim()) throw DimensionMismatch("cannot truncate to more levels than available");
  DressedOperator out;
  out.plus = plus.topLeftCorner(n, n);
  out.minus = minus.topLeftCorner(n, n);
  out.diagonal = diagonal.head(n);
  return out;
}

DressedOperator dressed_decompose(const Operator& op, const EigenSystem& basis) {
  const Operator d = basis.to_dressed(op);
  DressedOperator out;
  out.plus = d.triangularView<Eigen::StrictlyUpper>();
  out.minus = out.plus.adjoint();
  out.diagonal = d.diagonal();
  return out;
}

std::vector<int> parity_labels(const EigenSystem& es, const Operator& parity) {
  if (parity.rows() != es.dim()) throw DimensionMismatch("parity operator dimension mismatch");
  std::vector<int> labels(static_cast<std::size_t>(es.dim()));
  for (Index j = 0; j < es.dim(); ++j) {
    const double p = es.states.col(j).dot(parity * es.states.col(j)).real();
    labels[static_cast<std::size_t>(j)] = p >= 0.0 ? 1 : -1;
  }
  return labels;
}

std::string to_string(ConvergenceQuantity q) {
  return q == ConvergenceQuantity::vev ? "vev" : "ground_energy";
}

ConvergenceReport convergence_check(const SystemSpec& spec, ConvergenceQuantity quantity) {
  auto evaluate = [&](int cutoff) {
    SystemSpec s = spec;
    s.resonator.fock_cutoff = cutoff;
    const GroundProperties gp = ground_properties(s);
    return quantity == ConvergenceQuantity::vev ? gp.vev : gp.energy;
  };
  ConvergenceReport r;
  r.quantity = quantity;
  r.cutoff = spec.resonator.fock_cutoff;
  r.value = evaluate(r.cutoff);
  r.value_refined = evaluate(r.cutoff + 5);
  r.absolute_change = std::abs(r.value_refined - r.value);
  // Floor keeps symmetry-forced zeros (v at theta = 0) from reading as drift.
  r.relative_change = r.absolute_change / std::max(std::abs(r.value_refined), 1e-8);
  r.flagged = r.relative_change > kConvergenceFlagThreshold;
  return r;
}

}  // namespace usc
