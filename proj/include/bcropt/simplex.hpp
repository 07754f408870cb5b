#pragma once

// Revised simplex for bounded-variable linear programs.
//
// The solver works on the computational form  [A I] z = b  with structural
// columns first and one logical (slack) column per row. Phase 1 is the
// composite method: basic variables outside their bounds get unit costs and
// the same pricing/ratio machinery drives total infeasibility to zero, which
// makes warm starts from a near-feasible basis cheap. The basis inverse is
// held as an Eigen sparse LU factorization plus a product-form eta file,
// refactorized on a fixed interval or on numerical trouble. Dantzig pricing
// with a sticky switch to Bland's rule after a configurable run of
// degenerate pivots.

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/linear_program.hpp"
#include "bcropt/tolerances.hpp"

namespace bcropt {

class SimplexSolver {
 public:
  /// Column status in a basis snapshot.
  enum : std::int8_t { kAtLower = 0, kAtUpper = 1, kBasic = 2 };

  struct Basis {
    std::vector<std::int8_t> status;  // size n + m
    std::vector<int> basic;           // size m, column occupying each row position
  };

  explicit SimplexSolver(const LinearProgram& lp, bool validate = true) : lp_(lp) {
    if (validate) lp.validate();
    n_ = lp.num_vars;
    m_ = static_cast<int>(lp.rows.size());
    build_matrix();
  }

  LpSolution solve(const ToleranceConfig& tol) {
    return solve(tol, lp_.lower, lp_.upper, nullptr);
  }

  LpSolution solve(const ToleranceConfig& tol, std::span<const double> lb,
                   std::span<const double> ub, const Basis* warm = nullptr) {
    if (static_cast<int>(lb.size()) != n_ || static_cast<int>(ub.size()) != n_)
      throw DimensionMismatch("bound override size does not match program");
    tol_ = tol;
    setup_bounds(lb, ub);
    setup_costs();
    diag_ = LpDiagnostics{};

    if (warm != nullptr && warm_start_ok(*warm)) {
      load_basis(*warm);
    } else {
      slack_basis();
    }
    if (!refactorize()) {
      slack_basis();
      if (!refactorize()) throw NumericalBreakdown("initial basis factorization failed");
    }
    compute_basic_values();

    LpSolution out;
    const auto phase1 = run_phase1();
    if (phase1 == PhaseResult::infeasible) {
      out.status = LpStatus::infeasible;
      out.diag = diag_;
      return out;
    }
    const auto phase2 = run_phase2();
    if (phase2 == PhaseResult::unbounded) {
      out.status = LpStatus::unbounded;
      out.diag = diag_;
      return out;
    }
    return finish(tol);
  }

  /// Basis of the most recent solve, reusable as a warm start.
  Basis last_basis() const { return Basis{status_, basic_}; }

  int num_rows() const { return m_; }
  int num_cols() const { return n_; }

 private:
  enum class PhaseResult { ok, infeasible, unbounded };

  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // --- problem data in computational form ---
  const LinearProgram& lp_;
  int n_ = 0;  // structural columns
  int m_ = 0;  // rows == logical columns
  // CSC of the structural part; logical column j >= n_ is e_{j-n_}.
  std::vector<int> col_start_;
  std::vector<int> row_idx_;
  std::vector<double> val_;
  std::vector<double> b_;
  std::vector<double> lo_, up_;   // size n_ + m_
  std::vector<double> cost_;      // internal minimization costs, size n_ + m_
  bool flip_sign_ = false;        // true when the user problem maximizes

  // --- basis state ---
  std::vector<std::int8_t> status_;
  std::vector<int> basic_;
  std::vector<int> pos_in_basis_;  // column -> row position, -1 if nonbasic
  std::vector<double> xb_;         // basic values by row position
  std::vector<std::int8_t> viol_;  // -1 below, +1 above, 0 in bounds (phase 1)

  struct Eta {
    int r;
    double pivot;
    std::vector<std::pair<int, double>> col;  // entries of w except row r
  };
  mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu_;
  bool lu_valid_ = false;
  std::vector<Eta> etas_;

  ToleranceConfig tol_;
  LpDiagnostics diag_;
  bool bland_ = false;
  long degen_run_ = 0;

  void build_matrix() {
    std::vector<int> count(n_, 0);
    for (const auto& row : lp_.rows)
      for (const auto& [c, v] : row.terms)
        if (v != 0.0) ++count[c];
    col_start_.assign(n_ + 1, 0);
    for (int j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + count[j];
    row_idx_.resize(col_start_[n_]);
    val_.resize(col_start_[n_]);
    std::vector<int> fill(col_start_.begin(), col_start_.end() - 1);
    b_.resize(m_);
    for (int i = 0; i < m_; ++i) {
      b_[i] = lp_.rows[i].rhs;
      for (const auto& [c, v] : lp_.rows[i].terms) {
        if (v == 0.0) continue;
        row_idx_[fill[c]] = i;
        val_[fill[c]] = v;
        ++fill[c];
      }
    }
  }

  void setup_bounds(std::span<const double> lb, std::span<const double> ub) {
    lo_.assign(n_ + m_, 0.0);
    up_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      if (!std::isfinite(lb[j]) || !std::isfinite(ub[j]) || lb[j] > ub[j])
        throw MalformedProgram("invalid bound override at column " + std::to_string(j));
      lo_[j] = lb[j];
      up_[j] = ub[j];
    }
    for (int i = 0; i < m_; ++i) {
      switch (lp_.rows[i].rel) {
        case Relation::less_equal: lo_[n_ + i] = 0.0; up_[n_ + i] = kInf; break;
        case Relation::greater_equal: lo_[n_ + i] = -kInf; up_[n_ + i] = 0.0; break;
        case Relation::equal: lo_[n_ + i] = 0.0; up_[n_ + i] = 0.0; break;
      }
    }
  }

  void setup_costs() {
    flip_sign_ = (lp_.sense == Sense::maximize);
    cost_.assign(n_ + m_, 0.0);
    for (int j = 0; j < n_; ++j) cost_[j] = flip_sign_ ? -lp_.objective[j] : lp_.objective[j];
  }

  // Column j of [A I] accumulated into dense v with scale alpha.
  void add_column(int j, double alpha, std::vector<double>& v) const {
    if (alpha == 0.0) return;
    if (j < n_) {
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) v[row_idx_[k]] += alpha * val_[k];
    } else {
      v[j - n_] += alpha;
    }
  }

  double dot_column(int j, const std::vector<double>& v) const {
    if (j < n_) {
      double d = 0.0;
      for (int k = col_start_[j]; k < col_start_[j + 1]; ++k) d += val_[k] * v[row_idx_[k]];
      return d;
    }
    return v[j - n_];
  }

  double nonbasic_value(int j) const { return status_[j] == kAtUpper ? up_[j] : lo_[j]; }

  void slack_basis() {
    status_.assign(n_ + m_, kAtLower);
    for (int i = 0; i < m_; ++i) status_[n_ + i] = kBasic;
    basic_.resize(m_);
    for (int i = 0; i < m_; ++i) basic_[i] = n_ + i;
    rebuild_positions();
  }

  bool warm_start_ok(const Basis& basis) const {
    if (static_cast<int>(basis.status.size()) != n_ + m_) return false;
    if (static_cast<int>(basis.basic.size()) != m_) return false;
    std::vector<bool> seen(n_ + m_, false);
    for (int col : basis.basic) {
      if (col < 0 || col >= n_ + m_ || seen[col]) return false;
      if (basis.status[col] != kBasic) return false;
      seen[col] = true;
    }
    int basics = 0;
    for (auto s : basis.status) basics += (s == kBasic);
    return basics == m_;
  }

  void load_basis(const Basis& basis) {
    status_ = basis.status;
    basic_ = basis.basic;
    // A nonbasic column must rest on a finite bound; bounds may have moved
    // since the basis was recorded.
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic) continue;
      if (status_[j] == kAtUpper && !std::isfinite(up_[j])) status_[j] = kAtLower;
      if (status_[j] == kAtLower && !std::isfinite(lo_[j])) status_[j] = kAtUpper;
    }
    rebuild_positions();
  }

  void rebuild_positions() {
    pos_in_basis_.assign(n_ + m_, -1);
    for (int r = 0; r < m_; ++r) pos_in_basis_[basic_[r]] = r;
  }

  bool refactorize() {
    etas_.clear();
    if (m_ == 0) {
      lu_valid_ = true;
      return true;
    }
    Eigen::SparseMatrix<double> B(m_, m_);
    std::vector<Eigen::Triplet<double>> tr;
    for (int r = 0; r < m_; ++r) {
      const int j = basic_[r];
      if (j < n_) {
        for (int k = col_start_[j]; k < col_start_[j + 1]; ++k)
          tr.emplace_back(row_idx_[k], r, val_[k]);
      } else {
        tr.emplace_back(j - n_, r, 1.0);
      }
    }
    B.setFromTriplets(tr.begin(), tr.end());
    lu_.compute(B);
    lu_valid_ = (lu_.info() == Eigen::Success);
    if (lu_valid_) ++diag_.refactorizations;
    return lu_valid_;
  }

  // Solve B w = v in place. Note basis columns are indexed by row position,
  // so the factorized matrix maps position -> row; permute accordingly.
  void ftran(std::vector<double>& v) const {
    if (m_ == 0) return;
    Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
    Eigen::VectorXd sol = lu_.solve(mv);
    mv = sol;
    for (const auto& e : etas_) {
      double piv = v[e.r] / e.pivot;
      v[e.r] = piv;
      if (piv != 0.0)
        for (const auto& [i, w] : e.col) v[i] -= w * piv;
    }
  }

  // Solve B^T y = c in place.
  void btran(std::vector<double>& v) const {
    if (m_ == 0) return;
    for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
      double dot = 0.0;
      for (const auto& [i, w] : it->col) dot += w * v[i];
      v[it->r] = (v[it->r] - dot) / it->pivot;
    }
    Eigen::Map<Eigen::VectorXd> mv(v.data(), m_);
    Eigen::VectorXd sol = lu_.adjoint().solve(mv);
    mv = sol;
  }

  void compute_basic_values() {
    std::vector<double> rhs(b_);
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic) continue;
      add_column(j, -nonbasic_value(j), rhs);
    }
    ftran(rhs);
    xb_.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) xb_[r] = rhs[r];
    refresh_violations();
  }

  void refresh_violations() {
    viol_.assign(m_, 0);
    for (int r = 0; r < m_; ++r) viol_[r] = violation_flag(r);
  }

  std::int8_t violation_flag(int r) const {
    const int j = basic_[r];
    const double tol = tol_.feasibility * (1.0 + std::abs(xb_[r]));
    if (xb_[r] < lo_[j] - tol) return -1;
    if (xb_[r] > up_[j] + tol) return 1;
    return 0;
  }

  double total_infeasibility() const {
    double s = 0.0;
    for (int r = 0; r < m_; ++r) {
      const int j = basic_[r];
      if (viol_[r] < 0) s += lo_[j] - xb_[r];
      if (viol_[r] > 0) s += xb_[r] - up_[j];
    }
    return s;
  }

  // Reduced costs for the current phase. Phase 1 prices only the violation
  // costs carried by basic variables; every nonbasic cost is zero there.
  std::vector<double> dual_values(bool phase1) const {
    std::vector<double> y(m_, 0.0);
    for (int r = 0; r < m_; ++r) {
      if (phase1)
        y[r] = viol_[r] < 0 ? -1.0 : (viol_[r] > 0 ? 1.0 : 0.0);
      else
        y[r] = cost_[basic_[r]];
    }
    btran(y);
    return y;
  }

  struct Entering {
    int col = -1;
    int dir = 0;  // +1 leaves lower bound, -1 leaves upper bound
    double score = 0.0;
  };

  Entering price(const std::vector<double>& y, bool phase1) const {
    Entering best;
    const double thr = tol_.reduced_cost;
    for (int j = 0; j < n_ + m_; ++j) {
      if (status_[j] == kBasic) continue;
      if (lo_[j] == up_[j]) continue;  // fixed
      const double cj = phase1 ? 0.0 : cost_[j];
      const double d = cj - dot_column(j, y);
      int dir = 0;
      if (status_[j] == kAtLower && d < -thr)
        dir = 1;
      else if (status_[j] == kAtUpper && d > thr)
        dir = -1;
      if (dir == 0) continue;
      if (bland_) return Entering{j, dir, std::abs(d)};  // lowest index wins
      if (std::abs(d) > best.score) best = Entering{j, dir, std::abs(d)};
    }
    return best;
  }

  struct RatioResult {
    double step = kInf;
    int leave_row = -1;    // -1 means the entering column flips bound
    int leave_to = kAtLower;
  };

  RatioResult ratio_test(const Entering& ent, const std::vector<double>& w, bool phase1) const {
    RatioResult res;
    const double rate_eps = 1e-11;
    double best_weight = 0.0;
    for (int r = 0; r < m_; ++r) {
      if (w[r] == 0.0) continue;
      const double rate = -ent.dir * w[r];
      if (std::abs(rate) <= rate_eps) continue;
      const int j = basic_[r];
      const std::int8_t fl = phase1 ? viol_[r] : std::int8_t{0};
      double limit = kInf;
      int to = kAtLower;
      if (fl == 0) {
        if (rate > 0.0 && std::isfinite(up_[j])) {
          limit = (up_[j] - xb_[r]) / rate;
          to = kAtUpper;
        } else if (rate < 0.0 && std::isfinite(lo_[j])) {
          limit = (xb_[r] - lo_[j]) / (-rate);
          to = kAtLower;
        }
      } else if (fl < 0) {
        if (rate > 0.0) {
          limit = (lo_[j] - xb_[r]) / rate;
          to = kAtLower;
        }
      } else {
        if (rate < 0.0) {
          limit = (xb_[r] - up_[j]) / (-rate);
          to = kAtUpper;
        }
      }
      if (!std::isfinite(limit)) continue;
      limit = std::max(limit, 0.0);
      const double tie = 1e-9 * (1.0 + std::min(limit, res.step));
      if (limit < res.step - tie) {
        res.step = limit;
        res.leave_row = r;
        res.leave_to = to;
        best_weight = std::abs(w[r]);
      } else if (res.leave_row >= 0 && limit <= res.step + tie) {
        const bool better = bland_ ? (basic_[r] < basic_[res.leave_row])
                                   : (std::abs(w[r]) > best_weight);
        if (better) {
          res.step = std::min(res.step, limit);
          res.leave_row = r;
          res.leave_to = to;
          best_weight = std::abs(w[r]);
        }
      }
    }
    const double flip = up_[ent.col] - lo_[ent.col];
    if (std::isfinite(flip) && flip < res.step - 1e-9 * (1.0 + std::min(flip, res.step))) {
      res.step = flip;
      res.leave_row = -1;
    }
    return res;
  }

  long max_iterations() const {
    return 400L * (m_ + n_) + 20000L;
  }

  void note_degeneracy(double step) {
    if (step <= tol_.degenerate_step) {
      ++diag_.degenerate_pivots;
      if (++degen_run_ > tol_.bland_after && !bland_) {
        bland_ = true;
        diag_.used_bland = true;
      }
    } else {
      degen_run_ = 0;
    }
  }

  enum class StepResult { moved, optimal, unbounded };

  // One pricing + pivot step.
  template <typename OnPivot>
  StepResult step(bool phase1, OnPivot&& after_update) {
    const auto y = dual_values(phase1);
    const Entering ent = price(y, phase1);
    if (ent.col < 0) return StepResult::optimal;

    std::vector<double> w(m_, 0.0);
    add_column(ent.col, 1.0, w);
    ftran(w);

    const RatioResult rt = ratio_test(ent, w, phase1);
    if (!std::isfinite(rt.step)) {
      if (phase1) throw NumericalBreakdown("phase-1 ratio test found no blocking bound");
      return StepResult::unbounded;
    }
    note_degeneracy(rt.step);

    if (rt.leave_row < 0) {
      // Bound flip, basis unchanged.
      for (int r = 0; r < m_; ++r) xb_[r] -= ent.dir * rt.step * w[r];
      status_[ent.col] = (status_[ent.col] == kAtLower) ? kAtUpper : kAtLower;
    } else {
      const double piv = w[rt.leave_row];
      if (std::abs(piv) < tol_.pivot_min) {
        if (etas_.empty()) throw NumericalBreakdown("pivot below threshold after refactorization");
        if (!refactorize()) throw NumericalBreakdown("basis refactorization failed");
        compute_basic_values();
        return StepResult::moved;  // retry the iteration with a fresh factorization
      }
      for (int r = 0; r < m_; ++r) xb_[r] -= ent.dir * rt.step * w[r];
      const int leaving = basic_[rt.leave_row];
      const double enter_val =
          (ent.dir > 0 ? lo_[ent.col] : up_[ent.col]) + ent.dir * rt.step;
      status_[leaving] = static_cast<std::int8_t>(rt.leave_to);
      pos_in_basis_[leaving] = -1;
      basic_[rt.leave_row] = ent.col;
      status_[ent.col] = kBasic;
      pos_in_basis_[ent.col] = rt.leave_row;
      xb_[rt.leave_row] = enter_val;

      Eta eta;
      eta.r = rt.leave_row;
      eta.pivot = piv;
      for (int r = 0; r < m_; ++r)
        if (r != rt.leave_row && w[r] != 0.0) eta.col.emplace_back(r, w[r]);
      etas_.push_back(std::move(eta));
      if (static_cast<int>(etas_.size()) >= tol_.refactor_interval) {
        if (!refactorize()) throw NumericalBreakdown("basis refactorization failed");
        compute_basic_values();
      }
    }
    after_update(w);
    return StepResult::moved;
  }

  PhaseResult run_phase1() {
    bland_ = false;
    degen_run_ = 0;
    const long cap = max_iterations();
    while (true) {
      bool any_viol = false;
      for (int r = 0; r < m_; ++r) any_viol |= (viol_[r] != 0);
      if (!any_viol) return PhaseResult::ok;
      if (diag_.phase1_iterations++ > cap)
        throw NumericalBreakdown("phase 1 exceeded the iteration cap");
      ++diag_.iterations;
      const StepResult sr = step(/*phase1=*/true, [&](const std::vector<double>& w) {
        for (int r = 0; r < m_; ++r)
          if (w[r] != 0.0) viol_[r] = violation_flag(r);
      });
      if (sr == StepResult::optimal) {
        diag_.infeasibility = total_infeasibility();
        if (diag_.infeasibility <= tol_.feasibility * (1.0 + static_cast<double>(m_)))
          return PhaseResult::ok;  // violations are tolerance-level noise
        return PhaseResult::infeasible;
      }
    }
  }

  PhaseResult run_phase2() {
    bland_ = false;
    degen_run_ = 0;
    refresh_violations();
    const long cap = max_iterations();
    long iters = 0;
    while (true) {
      if (iters++ > cap) throw NumericalBreakdown("phase 2 exceeded the iteration cap");
      ++diag_.iterations;
      const StepResult sr = step(/*phase1=*/false, [](const std::vector<double>&) {});
      if (sr == StepResult::optimal) return PhaseResult::ok;
      if (sr == StepResult::unbounded) return PhaseResult::unbounded;
    }
  }

  LpSolution finish(const ToleranceConfig& tol) {
    for (int attempt = 0;; ++attempt) {
      LpSolution out = extract_solution();
      const bool primal_ok = out.diag.max_violation <= tol.feasibility;
      const bool dual_ok = out.diag.duality_gap <= tol.duality_gap;
      if (!tol.certify || (primal_ok && dual_ok)) return out;
      if (attempt >= 2)
        throw NumericalBreakdown("optimality certificate failed after refactorization");
      if (!refactorize()) throw NumericalBreakdown("basis refactorization failed");
      compute_basic_values();
      if (run_phase1() == PhaseResult::infeasible)
        throw NumericalBreakdown("feasibility lost during certificate repair");
      if (run_phase2() == PhaseResult::unbounded)
        throw NumericalBreakdown("unboundedness detected during certificate repair");
    }
  }

  LpSolution extract_solution() {
    LpSolution out;
    out.status = LpStatus::optimal;
    out.primal.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      out.primal[j] = status_[j] == kBasic ? xb_[pos_in_basis_[j]] : nonbasic_value(j);
    out.objective_value = lp_.eval_objective(out.primal);

    // Residual feasibility, relative to row/bound magnitudes.
    double worst = 0.0;
    std::vector<double> act(m_, 0.0);
    for (int j = 0; j < n_; ++j) {
      const double xj = out.primal[j];
      worst = std::max(worst, (lo_[j] - xj) / (1.0 + std::abs(lo_[j])));
      worst = std::max(worst, (xj - up_[j]) / (1.0 + std::abs(up_[j])));
      add_column(j, xj, act);
    }
    for (int r = 0; r < m_; ++r) {
      const double rhs = b_[r];
      const double scale = 1.0 + std::abs(rhs);
      switch (lp_.rows[r].rel) {
        case Relation::less_equal: worst = std::max(worst, (act[r] - rhs) / scale); break;
        case Relation::greater_equal: worst = std::max(worst, (rhs - act[r]) / scale); break;
        case Relation::equal: worst = std::max(worst, std::abs(act[r] - rhs) / scale); break;
      }
    }
    out.diag = diag_;
    out.diag.max_violation = worst;

    // Dual certificate: y from the basic costs, dual objective from bound
    // contributions of the nonbasic reduced costs.
    auto y = dual_values(/*phase1=*/false);
    double dual_obj = 0.0;
    for (int r = 0; r < m_; ++r) dual_obj += y[r] * b_[r];
    out.reduced_cost.assign(n_, 0.0);
    out.at_bound.assign(n_, 0);
    for (int j = 0; j < n_ + m_; ++j) {
      const double d = status_[j] == kBasic ? 0.0 : cost_[j] - dot_column(j, y);
      if (j < n_) {
        out.reduced_cost[j] = flip_sign_ ? -d : d;
        out.at_bound[j] = status_[j] == kBasic ? 0 : (status_[j] == kAtUpper ? 1 : -1);
      }
      if (status_[j] == kBasic) continue;
      const double v = nonbasic_value(j);
      if (v != 0.0 && std::isfinite(v)) dual_obj += d * v;
    }
    const double primal_internal =
        flip_sign_ ? -(out.objective_value - lp_.objective_offset)
                   : (out.objective_value - lp_.objective_offset);
    out.diag.duality_gap =
        std::abs(primal_internal - dual_obj) / (1.0 + std::abs(primal_internal));

    out.dual.assign(m_, 0.0);
    for (int r = 0; r < m_; ++r) out.dual[r] = flip_sign_ ? -y[r] : y[r];
    return out;
  }
};

/// One-shot interface used throughout the stack.
inline LpSolution solve_lp(const LinearProgram& lp, const ToleranceConfig& tol = {}) {
  SimplexSolver solver(lp);
  return solver.solve(tol);
}

}  // namespace bcropt
