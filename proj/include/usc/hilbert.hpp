#pragma once

// Truncated composite Hilbert space of one resonator mode and a set of
// two-level systems.
//
// Tensor order is fixed: resonator (x) qubit_1 (x) ... (x) qubit_N (x) probe.
// The Fock index varies slowest, the probe fastest. Two-level local basis:
// index 0 = |g>, index 1 = |e>, with sigma_z|e> = +|e>, sigma_z|g> = -|g>.

#include <Eigen/Dense>

#include <complex>
#include <initializer_list>

namespace usc {

using Complex = std::complex<double>;
using Operator = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Index = Eigen::Index;

enum class PauliAxis { x, z };

class SpaceLayout {
 public:
  SpaceLayout(int fock_cutoff, int n_qubits, bool has_probe);

  int fock_cutoff() const { return fock_cutoff_; }
  int n_qubits() const { return n_qubits_; }
  bool has_probe() const { return has_probe_; }
  // USC qubits plus the probe, i.e. every two-level subsystem.
  int n_two_level() const { return n_qubits_ + (has_probe_ ? 1 : 0); }
  Index total_dim() const { return total_dim_; }

  // Subsystem 0 is the resonator; subsystem s >= 1 is two-level system s - 1.
  int subsystem_count() const { return 1 + n_two_level(); }
  Index subsystem_dim(int subsystem) const;
  int two_level_subsystem(int two_level_index) const;
  int probe_index() const;  // two-level index of the probe

  bool operator==(const SpaceLayout&) const = default;

 private:
  int fock_cutoff_;
  int n_qubits_;
  bool has_probe_;
  Index total_dim_;
};

Operator local_pauli(PauliAxis axis);
Operator local_lowering();  // sigma_- = |g><e|
Operator local_annihilation(int fock_cutoff);

Operator kron(const Operator& a, const Operator& b);

// identity (x) ... (x) local_op (x) ... (x) identity.
Operator embed(const SpaceLayout& layout, int subsystem, const Operator& local_op);

Operator identity(const SpaceLayout& layout);
Operator annihilation(const SpaceLayout& layout);
Operator creation(const SpaceLayout& layout);
Operator number(const SpaceLayout& layout);
Operator quadrature(const SpaceLayout& layout);  // X = a + a^dagger
Operator pauli(const SpaceLayout& layout, int qubit_index, PauliAxis axis);
Operator lowering(const SpaceLayout& layout, int qubit_index);
Operator excited_projector(const SpaceLayout& layout, int qubit_index);

// Pi = exp(i pi [a^dagger a + sum_j (sigma_z^(j) + 1)/2]) over every
// two-level subsystem, probe included. Diagonal with entries +-1.
Operator parity_operator(const SpaceLayout& layout);

StateVector basis_state(const SpaceLayout& layout, int fock, std::initializer_list<int> excitations);

double max_abs(const Operator& op);
double hermiticity_error(const Operator& op);
Operator commutator(const Operator& a, const Operator& b);

}  // namespace usc
