#include "usc/hilbert.hpp"

#include "usc/error.hpp"

#include <cmath>
#include <string>

namespace usc {

SpaceLayout::SpaceLayout(int fock_cutoff, int n_qubits, bool has_probe)
    : fock_cutoff_(fock_cutoff), n_qubits_(n_qubits), has_probe_(has_probe) {
  if (fock_cutoff < 2) {
    throw InvalidLayout("fock cutoff must be >= 2, got " + std::to_string(fock_cutoff));
  }
  if (n_qubits < 0) throw InvalidLayout("negative qubit count");
  if (n_two_level() > 20) throw InvalidLayout("too many two-level systems for dense storage");
  total_dim_ = static_cast<Index>(fock_cutoff) << n_two_level();
}

Index SpaceLayout::subsystem_dim(int subsystem) const {
  if (subsystem < 0 || subsystem >= subsystem_count()) {
    throw InvalidLayout("subsystem index " + std::to_string(subsystem) + " out of range");
  }
  return subsystem == 0 ? fock_cutoff_ : 2;
}

int SpaceLayout::two_level_subsystem(int two_level_index) const {
  if (two_level_index < 0 || two_level_index >= n_two_level()) {
    throw InvalidLayout("qubit index " + std::to_string(two_level_index) + " out of range (" +
                        std::to_string(n_two_level()) + " two-level systems)");
  }
  return two_level_index + 1;
}

int SpaceLayout::probe_index() const {
  if (!has_probe_) throw InvalidLayout("layout has no probe qubit");
  return n_qubits_;
}

Operator local_pauli(PauliAxis axis) {
  Operator s = Operator::Zero(2, 2);
  switch (axis) {
    case PauliAxis::x:
      s(0, 1) = 1.0;
      s(1, 0) = 1.0;
      break;
    case PauliAxis::z:
      s(0, 0) = -1.0;
      s(1, 1) = 1.0;
      break;
  }
  return s;
}

Operator local_lowering() {
  Operator s = Operator::Zero(2, 2);
  s(0, 1) = 1.0;
  return s;
}

Operator local_annihilation(int fock_cutoff) {
  Operator a = Operator::Zero(fock_cutoff, fock_cutoff);
  for (int n = 1; n < fock_cutoff; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Operator kron(const Operator& a, const Operator& b) {
  Operator out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Operator embed(const SpaceLayout& layout, int subsystem, const Operator& local_op) {
  const Index d = layout.subsystem_dim(subsystem);
  if (local_op.rows() != d || local_op.cols() != d) {
    throw DimensionMismatch("local operator is " + std::to_string(local_op.rows()) + "x" +
                            std::to_string(local_op.cols()) + ", subsystem " +
                            std::to_string(subsystem) + " has dimension " + std::to_string(d));
  }
  Index before = 1;
  for (int s = 0; s < subsystem; ++s) before *= layout.subsystem_dim(s);
  const Index after = layout.total_dim() / (before * d);

  // I_before (x) local (x) I_after, written out directly.
  Operator out = Operator::Zero(layout.total_dim(), layout.total_dim());
  for (Index b = 0; b < before; ++b) {
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) {
        const Complex v = local_op(i, j);
        if (v == Complex(0.0)) continue;
        const Index row0 = (b * d + i) * after;
        const Index col0 = (b * d + j) * after;
        for (Index k = 0; k < after; ++k) out(row0 + k, col0 + k) = v;
      }
    }
  }
  return out;
}

Operator identity(const SpaceLayout& layout) {
  return Operator::Identity(layout.total_dim(), layout.total_dim());
}

Operator annihilation(const SpaceLayout& layout) {
  return embed(layout, 0, local_annihilation(layout.fock_cutoff()));
}

Operator creation(const SpaceLayout& layout) { return annihilation(layout).adjoint(); }

Operator number(const SpaceLayout& layout) {
  Operator n = Operator::Zero(layout.fock_cutoff(), layout.fock_cutoff());
  for (int k = 0; k < layout.fock_cutoff(); ++k) n(k, k) = static_cast<double>(k);
  return embed(layout, 0, n);
}

Operator quadrature(const SpaceLayout& layout) {
  const Operator a = local_annihilation(layout.fock_cutoff());
  return embed(layout, 0, a + a.adjoint());
}

Operator pauli(const SpaceLayout& layout, int qubit_index, PauliAxis axis) {
  return embed(layout, layout.two_level_subsystem(qubit_index), local_pauli(axis));
}

Operator lowering(const SpaceLayout& layout, int qubit_index) {
  return embed(layout, layout.two_level_subsystem(qubit_index), local_lowering());
}

Operator excited_projector(const SpaceLayout& layout, int qubit_index) {
  Operator p = Operator::Zero(2, 2);
  p(1, 1) = 1.0;
  return embed(layout, layout.two_level_subsystem(qubit_index), p);
}

Operator parity_operator(const SpaceLayout& layout) {
  const Index dim = layout.total_dim();
  const Index qubit_states = Index{1} << layout.n_two_level();
  Operator pi = Operator::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    const Index fock = i / qubit_states;
    const Index bits = i % qubit_states;
    int excitations = static_cast<int>(fock);
    for (Index b = bits; b != 0; b >>= 1) excitations += static_cast<int>(b & 1);
    pi(i, i) = (excitations % 2 == 0) ? 1.0 : -1.0;
  }
  return pi;
}

StateVector basis_state(const SpaceLayout& layout, int fock,
                        std::initializer_list<int> excitations) {
  if (fock < 0 || fock >= layout.fock_cutoff()) throw InvalidLayout("fock index out of range");
  if (static_cast<int>(excitations.size()) != layout.n_two_level()) {
    throw InvalidLayout("basis_state needs one excitation flag per two-level system");
  }
  Index index = fock;
  for (int e : excitations) index = 2 * index + (e != 0 ? 1 : 0);
  StateVector v = StateVector::Zero(layout.total_dim());
  v(index) = 1.0;
  return v;
}

double max_abs(const Operator& op) { return op.size() == 0 ? 0.0 : op.cwiseAbs().maxCoeff(); }

double hermiticity_error(const Operator& op) {
  if (op.rows() != op.cols()) throw DimensionMismatch("operator is not square");
  return max_abs(op - op.adjoint());
}

Operator commutator(const Operator& a, const Operator& b) { return a * b - b * a; }

}  // namespace usc
