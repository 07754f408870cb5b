#pragma once

// Newton/Dinkelbach iteration for maximizing a ratio of affine forms over a
// mixed-integer feasible set. Each iteration solves one linearized MIP with
// objective B - q_k C and updates q to the incumbent's ratio; convergence is
// declared when the subproblem value drops below epsilon.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/mip.hpp"

namespace bcropt {

struct AffineForm {
  std::vector<double> coef;
  double constant = 0.0;

  double value(std::span<const double> x) const {
    double v = constant;
    for (std::size_t j = 0; j < coef.size(); ++j) v += coef[j] * x[j];
    return v;
  }
};

struct FractionalModel {
  MixedIntegerProgram constraints;  // objective entries are ignored
  AffineForm benefit;               // numerator B
  AffineForm cost;                  // denominator C, positive on the feasible set

  void validate() const {
    constraints.validate();
    const auto n = static_cast<std::size_t>(constraints.base.num_vars);
    if (benefit.coef.size() != n || cost.coef.size() != n)
      throw MalformedProgram("benefit/cost dimension does not match the constraint system");
  }
};

struct RatioIteration {
  double q;                 // parameter entering the subproblem
  double subproblem_value;  // F(q) = max B - q C
  double benefit;
  double cost;
  MipStatus sub_status;
  double sub_gap;
  long nodes;
};

enum class RatioStatus { converged, iteration_limit, infeasible };

struct RatioSolution {
  RatioStatus status = RatioStatus::infeasible;
  std::vector<double> x_star;
  double q_star = 0.0;          // ratio of the final iterate
  double best_ratio_seen = 0.0; // best incumbent ratio across iterations
  std::vector<double> best_x;
  double epsilon = 0.0;         // convergence threshold actually used
  std::vector<RatioIteration> iterations;
  bool monotone = true;         // q_k nondecreasing over the run
  std::string warning;
};

/// Ratio of the two forms at a feasible point.
inline double evaluate_ratio(const FractionalModel& fm, std::span<const double> x,
                             const ToleranceConfig& tol = {}) {
  fm.validate();
  if (static_cast<int>(x.size()) != fm.constraints.base.num_vars)
    throw DimensionMismatch("point size does not match the constraint system");
  if (detail::relative_violation(fm.constraints.base, x) > tol.feasibility ||
      detail::integrality_violation(fm.constraints, x) > tol.integrality)
    throw InfeasiblePoint("point violates the constraint system");
  const double c = fm.cost.value(x);
  if (c <= 0.0) throw NonpositiveDenominator("cost form is not positive at the point");
  return fm.benefit.value(x) / c;
}

/// Algorithm: q_0 = 0; solve F(q_k) = max{B(x) - q_k C(x) : x feasible}; stop
/// when F(q_k) < epsilon, else q_{k+1} = B(x_k*)/C(x_k*). Pass epsilon <= 0
/// to use 1e-6 * max(1, |B(x_0*)|), scaled off the first subproblem. A warm
/// start seeds the first subproblem; later ones reuse the previous iterate,
/// which stays feasible because only the objective changes.
inline RatioSolution maximize_ratio(const FractionalModel& fm, double epsilon,
                                    const MipConfig& sub_cfg, int max_iter = 50,
                                    std::span<const double> warm_start = {}) {
  fm.validate();
  MixedIntegerProgram sub = fm.constraints;
  sub.base.sense = Sense::maximize;

  RatioSolution out;
  out.epsilon = epsilon;
  double q = 0.0;
  std::vector<double> warm(warm_start.begin(), warm_start.end());
  const bool exact = sub_cfg.gap_target == 0.0;

  for (int k = 0; k < max_iter; ++k) {
    for (int j = 0; j < sub.base.num_vars; ++j)
      sub.base.objective[j] = fm.benefit.coef[j] - q * fm.cost.coef[j];
    sub.base.objective_offset = fm.benefit.constant - q * fm.cost.constant;

    MipSolution sol = solve_mip(sub, sub_cfg, warm);
    if (sol.status == MipStatus::infeasible) {
      if (k == 0) throw InfeasibleModel("ratio model has an empty feasible set");
      throw NumericalBreakdown("subproblem became infeasible after the first iteration");
    }
    const double bval = fm.benefit.value(sol.incumbent);
    const double cval = fm.cost.value(sol.incumbent);
    if (cval <= 0.0)
      throw DenominatorViolation("feasible incumbent with nonpositive cost; the model builder"
                                 " must guarantee a positive denominator");
    const double fq = bval - q * cval;
    const double ratio = bval / cval;
    out.iterations.push_back(RatioIteration{q, fq, bval, cval, sol.status, sol.gap,
                                            sol.nodes_explored});
    if (k == 0 && epsilon <= 0.0) {
      out.epsilon = 1e-6 * std::max(1.0, std::abs(bval));
    }
    if (out.best_x.empty() || ratio > out.best_ratio_seen) {
      out.best_ratio_seen = ratio;
      out.best_x = sol.incumbent;
    }
    if (ratio < q - 1e-12 * (1.0 + std::abs(q))) {
      // The q update would decrease: impossible with exact subproblem solves
      // once q is a feasible ratio, expected occasionally under a positive gap.
      out.monotone = false;
      if (!exact)
        out.warning = "q sequence not monotone under an inexact subproblem gap; "
                      "best_ratio_seen holds the best incumbent";
    }
    if (fq < out.epsilon) {
      // With the q0 = 0 initialization, F(0) < 0 means every feasible ratio is
      // negative and the stopping rule would return the benefit maximizer; in
      // that corner continue from the incumbent ratio instead of stopping.
      if (!(k == 0 && fq < -out.epsilon)) {
        out.status = RatioStatus::converged;
        out.x_star = sol.incumbent;
        out.q_star = ratio;
        return out;
      }
      out.warning = "maximum ratio is negative; continued past the q0 = 0 stopping rule";
    }
    q = ratio;
    warm = std::move(sol.incumbent);
  }
  out.status = RatioStatus::iteration_limit;
  out.x_star = out.best_x;
  out.q_star = out.best_ratio_seen;
  return out;
}

}  // namespace bcropt
