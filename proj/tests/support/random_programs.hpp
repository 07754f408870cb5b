#pragma once

// Seeded generators for random LPs and MIPs used against the enumeration
// oracles. Coefficients are small integers (or quarters) so objective
// comparisons are exact in double arithmetic and every instance is feasible
// by construction around a known interior point.

#include <vector>

#include "bcropt/linear_program.hpp"
#include "bcropt/mip.hpp"
#include "bcropt/rng.hpp"

namespace bcropt::testing {

inline LinearProgram random_dense_lp(Rng& rng, int num_vars = 5, int num_rows = 5) {
  LinearProgram lp;
  lp.sense = rng.chance(1, 2) ? Sense::maximize : Sense::minimize;
  for (int j = 0; j < num_vars; ++j) {
    const double lo = static_cast<double>(rng.uniform_int(0, 2));
    const double hi = lo + static_cast<double>(rng.uniform_int(1, 8));
    lp.add_var(lo, hi, static_cast<double>(rng.uniform_int(-10, 10)));
  }
  // interior point the constraints are anchored on
  std::vector<double> x0(num_vars);
  for (int j = 0; j < num_vars; ++j) {
    const double lo = lp.lower[j], hi = lp.upper[j];
    x0[j] = lo + 0.25 * static_cast<double>(rng.uniform_int(0, static_cast<long>(4 * (hi - lo))));
  }
  int equalities = 0;
  for (int i = 0; i < num_rows; ++i) {
    std::vector<std::pair<int, double>> terms;
    double activity = 0.0;
    for (int j = 0; j < num_vars; ++j) {
      const double c = static_cast<double>(rng.uniform_int(-5, 5));
      if (c != 0.0) {
        terms.emplace_back(j, c);
        activity += c * x0[j];
      }
    }
    if (terms.empty()) terms.emplace_back(0, 1.0), activity = x0[0];
    const int kind = static_cast<int>(rng.uniform_int(0, equalities < 2 ? 9 : 7));
    if (kind < 4) {
      lp.add_row(std::move(terms), Relation::less_equal,
                 activity + static_cast<double>(rng.uniform_int(0, 10)));
    } else if (kind < 8) {
      lp.add_row(std::move(terms), Relation::greater_equal,
                 activity - static_cast<double>(rng.uniform_int(0, 10)));
    } else {
      lp.add_row(std::move(terms), Relation::equal, activity);
      ++equalities;
    }
  }
  return lp;
}

/// Random MIP with all-integer data, feasible around an integer point.
/// `continuous_tail` appends that many continuous variables.
inline MixedIntegerProgram random_mip(Rng& rng, int num_binaries = 8, int num_rows = 6,
                                      int continuous_tail = 0) {
  MixedIntegerProgram mip;
  LinearProgram& lp = mip.base;
  lp.sense = rng.chance(1, 2) ? Sense::maximize : Sense::minimize;
  std::vector<double> x0;
  for (int j = 0; j < num_binaries; ++j) {
    lp.add_var(0.0, 1.0, static_cast<double>(rng.uniform_int(-12, 12)));
    mip.kind.push_back(VarKind::binary);
    x0.push_back(static_cast<double>(rng.uniform_int(0, 1)));
  }
  for (int j = 0; j < continuous_tail; ++j) {
    const double hi = static_cast<double>(rng.uniform_int(1, 6));
    lp.add_var(0.0, hi, static_cast<double>(rng.uniform_int(-6, 6)));
    mip.kind.push_back(VarKind::continuous);
    x0.push_back(static_cast<double>(rng.uniform_int(0, static_cast<long>(hi))));
  }
  for (int i = 0; i < num_rows; ++i) {
    std::vector<std::pair<int, double>> terms;
    double activity = 0.0;
    for (int j = 0; j < lp.num_vars; ++j) {
      if (rng.chance(2, 5)) continue;
      const double c = static_cast<double>(rng.uniform_int(-4, 4));
      if (c == 0.0) continue;
      terms.emplace_back(j, c);
      activity += c * x0[j];
    }
    if (terms.empty()) continue;
    if (rng.chance(1, 2))
      lp.add_row(std::move(terms), Relation::less_equal,
                 activity + static_cast<double>(rng.uniform_int(0, 4)));
    else
      lp.add_row(std::move(terms), Relation::greater_equal,
                 activity - static_cast<double>(rng.uniform_int(0, 4)));
  }
  return mip;
}

}  // namespace bcropt::testing
