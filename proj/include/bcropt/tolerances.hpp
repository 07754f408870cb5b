#pragma once

#include <cstdint>

namespace bcropt {

/// Single knob surface shared by every solver layer. A run is reproducible
/// from (inputs, ToleranceConfig) alone.
struct ToleranceConfig {
  double feasibility = 1e-7;     // max allowed constraint/bound violation
  double duality_gap = 1e-7;     // relative primal/dual agreement for LP certificates
  double integrality = 1e-6;     // distance from integer accepted as integral
  double reduced_cost = 1e-9;    // entering-candidate threshold
  double pivot_min = 1e-9;       // pivots below this trigger refactorize, then breakdown
  double degenerate_step = 1e-10;  // steps below this count as degenerate
  int bland_after = 100;         // degenerate pivots before switching to Bland's rule
  int refactor_interval = 64;    // eta updates between basis refactorizations
  bool certify = true;           // verify feasibility + duality gap on every optimal LP
  std::uint64_t enumeration_cap = std::uint64_t{1} << 20;  // brute-force search space cap
};

}  // namespace bcropt
