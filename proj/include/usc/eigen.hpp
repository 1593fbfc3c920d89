#pragma once

#include "usc/model.hpp"

#include <string>
#include <vector>

namespace usc {

// Energies ascending; states(:, j) is |j>. Each eigenvector is gauge fixed so
// that its largest-magnitude component is real and positive.
struct EigenSystem {
  Eigen::VectorXd energies;
  Operator states;

  Index dim() const { return energies.size(); }
  StateVector ground() const { return states.col(0); }
  // U^dagger op U.
  Operator to_dressed(const Operator& op) const;
  // U op U^dagger.
  Operator to_bare(const Operator& dressed) const;
};

// Eigenvectors whose energies sit closer than this are treated as degenerate.
inline constexpr double kDegeneracyWindow = 1e-9;

// Full diagonalization of a Hermitian operator. When a parity operator is
// supplied and commutes with h, degenerate clusters are rotated into parity
// eigenstates (even first) before gauge fixing; otherwise solver order is kept.
EigenSystem diagonalize(const Operator& h, const Operator* parity = nullptr);

void fix_gauge(EigenSystem& es);

// Static Hamiltonian of spec, diagonalized with its parity operator.
EigenSystem diagonalize_spec(const SystemSpec& spec);

struct GroundProperties {
  double energy = 0.0;
  double vev = 0.0;              // <G|a + a^dagger|G>
  Complex field_amplitude{};     // <G|a|G>
  double photon_number = 0.0;    // <G|a^dagger a|G>
};

GroundProperties ground_properties(const SystemSpec& spec);
double ground_vev(const SystemSpec& spec);
double ground_photon_number(const SystemSpec& spec);
// |<G|a|G>|^2 / <G|a^dagger a|G>; defined as 1 when the photon number vanishes.
double first_order_coherence(const SystemSpec& spec);

// Positive/negative frequency parts of a Hermitian system operator, in the
// dressed coordinates of the basis it was decomposed against:
// plus = sum_{j<k} O_jk |j><k|, minus = plus^dagger.
struct DressedOperator {
  Operator plus;
  Operator minus;
  Eigen::VectorXcd diagonal;

  Index dim() const { return plus.rows(); }
  // Leading n x n block; exact for products such as minus * plus because
  // plus only connects each level to lower ones.
  DressedOperator truncated(Index n) const;
};

DressedOperator dressed_decompose(const Operator& op, const EigenSystem& basis);

// Sign of <j|Pi|j> for every dressed state.
std::vector<int> parity_labels(const EigenSystem& es, const Operator& parity);

enum class ConvergenceQuantity { vev, ground_energy };

struct ConvergenceReport {
  ConvergenceQuantity quantity = ConvergenceQuantity::vev;
  int cutoff = 0;
  double value = 0.0;            // at the requested cutoff
  double value_refined = 0.0;    // at cutoff + 5
  double absolute_change = 0.0;
  double relative_change = 0.0;
  bool flagged = false;          // relative change above 1e-6
};

inline constexpr double kConvergenceFlagThreshold = 1e-6;

ConvergenceReport convergence_check(const SystemSpec& spec, ConvergenceQuantity quantity);

std::string to_string(ConvergenceQuantity q);

}  // namespace usc
