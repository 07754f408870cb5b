#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bcropt/errors.hpp"

namespace bcropt {

enum class Sense { maximize, minimize };
enum class Relation { less_equal, greater_equal, equal };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::less_equal: return "<=";
    case Relation::greater_equal: return ">=";
    case Relation::equal: return "=";
  }
  return "?";
}

/// One sparse constraint row: sum(coef * x[col]) REL rhs.
struct ConstraintRow {
  std::vector<std::pair<int, double>> terms;
  Relation rel = Relation::less_equal;
  double rhs = 0.0;
  std::string label;  // optional, used in diagnostics
};

/// Dense objective over sparse rows. Every variable carries finite bounds;
/// boundedness of the feasible set is a construction-time obligation of the
/// caller, not something the solver discovers.
struct LinearProgram {
  int num_vars = 0;
  Sense sense = Sense::maximize;
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<ConstraintRow> rows;
  std::vector<double> lower;
  std::vector<double> upper;

  int add_var(double lb, double ub, double obj = 0.0) {
    lower.push_back(lb);
    upper.push_back(ub);
    objective.push_back(obj);
    return num_vars++;
  }

  void add_row(std::vector<std::pair<int, double>> terms, Relation rel, double rhs,
               std::string label = {}) {
    rows.push_back(ConstraintRow{std::move(terms), rel, rhs, std::move(label)});
  }

  double eval_objective(std::span<const double> x) const {
    double v = objective_offset;
    for (int j = 0; j < num_vars; ++j) v += objective[j] * x[j];
    return v;
  }

  void validate() const {
    if (num_vars < 0) throw MalformedProgram("negative variable count");
    if (static_cast<int>(objective.size()) != num_vars ||
        static_cast<int>(lower.size()) != num_vars ||
        static_cast<int>(upper.size()) != num_vars)
      throw MalformedProgram("objective/bounds size does not match num_vars");
    if (!std::isfinite(objective_offset)) throw MalformedProgram("non-finite objective offset");
    for (int j = 0; j < num_vars; ++j) {
      if (!std::isfinite(objective[j]))
        throw MalformedProgram("non-finite objective coefficient at column " + std::to_string(j));
      if (!std::isfinite(lower[j]) || !std::isfinite(upper[j]))
        throw MalformedProgram("variable " + std::to_string(j) +
                               " must have finite bounds");
      if (lower[j] > upper[j])
        throw MalformedProgram("variable " + std::to_string(j) + " has lower > upper");
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const auto& row = rows[i];
      if (!std::isfinite(row.rhs))
        throw MalformedProgram("non-finite rhs in row " + std::to_string(i));
      for (const auto& [col, coef] : row.terms) {
        if (col < 0 || col >= num_vars)
          throw MalformedProgram("row " + std::to_string(i) + " references invalid column " +
                                 std::to_string(col));
        if (!std::isfinite(coef))
          throw MalformedProgram("non-finite coefficient in row " + std::to_string(i));
      }
    }
  }
};

/// Largest violation of rows and bounds at x. Zero means feasible.
inline double max_violation(const LinearProgram& lp, std::span<const double> x) {
  if (static_cast<int>(x.size()) != lp.num_vars)
    throw DimensionMismatch("point size does not match program");
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, lp.lower[j] - x[j]);
    worst = std::max(worst, x[j] - lp.upper[j]);
  }
  for (const auto& row : lp.rows) {
    double act = 0.0;
    for (const auto& [col, coef] : row.terms) act += coef * x[col];
    switch (row.rel) {
      case Relation::less_equal: worst = std::max(worst, act - row.rhs); break;
      case Relation::greater_equal: worst = std::max(worst, row.rhs - act); break;
      case Relation::equal: worst = std::max(worst, std::abs(act - row.rhs)); break;
    }
  }
  return worst;
}

enum class LpStatus { optimal, infeasible, unbounded };

struct LpDiagnostics {
  long iterations = 0;
  long phase1_iterations = 0;
  int refactorizations = 0;
  long degenerate_pivots = 0;
  bool used_bland = false;
  double max_violation = 0.0;   // primal feasibility of the returned point
  double duality_gap = 0.0;     // |primal - dual| relative, optimal solves only
  double infeasibility = 0.0;   // phase-1 optimum when status == infeasible
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> primal;
  double objective_value = 0.0;
  std::vector<double> dual;          // one multiplier per row, populated when optimal
  std::vector<double> reduced_cost;  // per structural column, user sense, optimal only
  std::vector<std::int8_t> at_bound; // -1 nonbasic at lower, +1 at upper, 0 basic
  LpDiagnostics diag;
};

}  // namespace bcropt
