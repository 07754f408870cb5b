#pragma once

// Independent optimum for small LPs by enumerating basic feasible points:
// every choice of n tight constraints (rows as equalities, variable bounds)
// is solved as a square system and checked for feasibility. Equality rows
// are mandatory members of every tight set. Exponential, test-only.

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "bcropt/linear_program.hpp"

namespace bcropt::testing {

struct VertexOptimum {
  bool feasible = false;
  double objective = 0.0;
  std::vector<double> point;
};

inline VertexOptimum vertex_enumeration_optimum(const LinearProgram& lp,
                                                double feas_tol = 1e-9) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());

  struct Tight {
    bool is_row;
    int index;     // row index or variable index
    bool at_upper; // bound side when !is_row
  };
  std::vector<Tight> mandatory;
  std::vector<Tight> optional;
  for (int i = 0; i < m; ++i) {
    if (lp.rows[i].rel == Relation::equal)
      mandatory.push_back({true, i, false});
    else
      optional.push_back({true, i, false});
  }
  for (int j = 0; j < n; ++j) {
    optional.push_back({false, j, false});
    if (lp.upper[j] != lp.lower[j]) optional.push_back({false, j, true});
  }

  VertexOptimum best;
  const int need = n - static_cast<int>(mandatory.size());
  if (need < 0) return best;

  std::vector<int> pick(need);
  for (int i = 0; i < need; ++i) pick[i] = i;

  Eigen::MatrixXd A(n, n);
  Eigen::VectorXd rhs(n);

  auto evaluate = [&](const std::vector<Tight>& tight) {
    A.setZero();
    for (int k = 0; k < n; ++k) {
      const Tight& t = tight[k];
      if (t.is_row) {
        for (const auto& [col, coef] : lp.rows[t.index].terms) A(k, col) += coef;
        rhs(k) = lp.rows[t.index].rhs;
      } else {
        A(k, t.index) = 1.0;
        rhs(k) = t.at_upper ? lp.upper[t.index] : lp.lower[t.index];
      }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible()) return;
    Eigen::VectorXd x = lu.solve(rhs);
    std::vector<double> xv(x.data(), x.data() + n);
    if (max_violation(lp, xv) > feas_tol) return;
    const double obj = lp.eval_objective(xv);
    const bool better = lp.sense == Sense::maximize ? obj > best.objective : obj < best.objective;
    if (!best.feasible || better) {
      best.feasible = true;
      best.objective = obj;
      best.point = std::move(xv);
    }
  };

  std::vector<Tight> tight(mandatory);
  tight.resize(n, Tight{false, 0, false});
  const int opt_count = static_cast<int>(optional.size());
  if (need == 0) {
    evaluate(tight);
    return best;
  }
  if (need > opt_count) return best;

  while (true) {
    for (int i = 0; i < need; ++i) tight[mandatory.size() + i] = optional[pick[i]];
    evaluate(tight);
    int i = need - 1;
    while (i >= 0 && pick[i] == opt_count - need + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < need; ++k) pick[k] = pick[k - 1] + 1;
  }
  return best;
}

}  // namespace bcropt::testing
