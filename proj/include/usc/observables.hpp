#pragma once

// Detection quantities. Photodetection in the ultrastrong regime must use the
// dressed positive-frequency parts: the bare <a^dagger a> of the ground state
// is nonzero but carries no output flux.

#include "usc/lindblad.hpp"

namespace usc {

// Output photon flux in units of gamma_c.
struct EmissionRecord {
  double total = 0.0;       // <X^- X^+>
  double coherent = 0.0;    // |<X^+>|^2
  double incoherent = 0.0;  // total - coherent
};

// rho and x_dressed must share the dressed basis; x_dressed may cover more
// levels than rho (its leading block is used).
EmissionRecord emission_rate(const DensityMatrix& rho, const DressedOperator& x_dressed);

// Emission is proportional to <sigma_x^- sigma_x^+> for a qubit channel.
double qubit_emission(const DensityMatrix& rho, const DressedOperator& sx_dressed);

// Excited-state population of the bare probe qubit.
double probe_population(const DensityMatrix& rho, const DressedFrame& frame);

// Dressed-frame operators of the detection quantities, levels x levels.
Operator emission_operator(const DressedOperator& x_dressed);  // X^- X^+
Operator probe_projector(const DressedFrame& frame);

}  // namespace usc
