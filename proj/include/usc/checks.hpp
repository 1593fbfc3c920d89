#pragma once

// Cross-validation of the exact numerics against closed-form limits. Quick
// enough to run on every invocation of `uscqed check`.

#include <string>
#include <vector>

namespace usc {

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

std::vector<CheckOutcome> run_oracle_checks(int fock_cutoff = 20);

}  // namespace usc
