#include "usc/observables.hpp"

#include "usc/error.hpp"

#include <algorithm>

namespace usc {

namespace {

DressedOperator matched(const DensityMatrix& rho, const DressedOperator& op) {
  if (op.dim() < rho.dim()) {
    throw DimensionMismatch("dressed operator covers fewer levels than the density matrix");
  }
  return op.dim() == rho.dim() ? op : op.truncated(rho.dim());
}

}  // namespace

Operator emission_operator(const DressedOperator& x_dressed) {
  return x_dressed.minus * x_dressed.plus;
}

EmissionRecord emission_rate(const DensityMatrix& rho, const DressedOperator& x_dressed) {
  const DressedOperator x = matched(rho, x_dressed);
  EmissionRecord r;
  r.total = std::max(0.0, expectation(rho, emission_operator(x)).real());
  r.coherent = std::norm(expectation(rho, x.plus));
  r.incoherent = r.total - r.coherent;
  return r;
}

double qubit_emission(const DensityMatrix& rho, const DressedOperator& sx_dressed) {
  const DressedOperator s = matched(rho, sx_dressed);
  return std::max(0.0, expectation(rho, s.minus * s.plus).real());
}

Operator probe_projector(const DressedFrame& frame) {
  const SystemSpec& spec = frame.spec();
  if (!spec.probe) throw InvalidSpec("probe population requested without a probe qubit");
  const SpaceLayout layout = spec.layout();
  return frame.project(excited_projector(layout, layout.probe_index()));
}

double probe_population(const DensityMatrix& rho, const DressedFrame& frame) {
  return expectation(rho, probe_projector(frame)).real();
}

}  // namespace usc
