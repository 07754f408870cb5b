#pragma once

// Branch and bound over simplex relaxations, plus the exhaustive-enumeration
// oracle used by tests and acceptance runs.
//
// Node selection is best-bound with FIFO tie-break, branching picks the most
// fractional integer variable (lowest index on ties), both chosen for
// determinism. The node queue can be served by several workers; with
// gap_target = 0 the returned objective value is independent of the
// interleaving, and single-worker runs are bit-reproducible.

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <thread>
#include <vector>

#include "bcropt/errors.hpp"
#include "bcropt/linear_program.hpp"
#include "bcropt/simplex.hpp"
#include "bcropt/tolerances.hpp"

namespace bcropt {

enum class VarKind { continuous, binary, integer };

struct MixedIntegerProgram {
  LinearProgram base;
  std::vector<VarKind> kind;

  bool has_integers() const {
    for (auto k : kind)
      if (k != VarKind::continuous) return true;
    return false;
  }

  void validate() const {
    base.validate();
    if (static_cast<int>(kind.size()) != base.num_vars)
      throw MalformedProgram("kind vector size does not match num_vars");
    for (int j = 0; j < base.num_vars; ++j) {
      if (kind[j] == VarKind::binary) {
        if (base.lower[j] < -0.0 || base.upper[j] > 1.0)
          throw MalformedProgram("binary variable " + std::to_string(j) +
                                 " has bounds outside [0,1]");
      }
      if (kind[j] != VarKind::continuous) {
        if (std::floor(base.lower[j]) != base.lower[j] ||
            std::floor(base.upper[j]) != base.upper[j])
          throw MalformedProgram("integer variable " + std::to_string(j) +
                                 " has non-integral bounds");
      }
    }
  }
};

enum class MipStatus { optimal, feasible, infeasible, gap_limit, time_limit };

struct MipSolution {
  MipStatus status = MipStatus::infeasible;
  std::vector<double> incumbent;
  double objective_value = 0.0;
  double bound = 0.0;  // best dual bound in the user's sense
  double gap = 0.0;    // |bound - objective| / max(1, |objective|)
  long nodes_explored = 0;
  std::vector<double> pruned_bounds;  // audit mode only, user sense
};

struct MipConfig {
  double gap_target = 0.05;  // matches the 5% default used throughout
  long node_limit = 2'000'000;
  double time_limit_seconds = std::numeric_limits<double>::infinity();
  int workers = 1;
  int plunge_depth = 4;  // in-line child dives between best-bound pulls
  bool audit = false;     // record pruned-node bounds for soundness replay
  bool trace = false;     // progress lines on stderr
  ToleranceConfig tol{};
};

namespace detail {

/// Feasibility of x for rows and bounds, scaled like the LP certificate.
inline double relative_violation(const LinearProgram& lp, std::span<const double> x) {
  double worst = 0.0;
  for (int j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, (lp.lower[j] - x[j]) / (1.0 + std::abs(lp.lower[j])));
    worst = std::max(worst, (x[j] - lp.upper[j]) / (1.0 + std::abs(lp.upper[j])));
  }
  for (const auto& row : lp.rows) {
    double act = 0.0;
    for (const auto& [col, coef] : row.terms) act += coef * x[col];
    const double scale = 1.0 + std::abs(row.rhs);
    switch (row.rel) {
      case Relation::less_equal: worst = std::max(worst, (act - row.rhs) / scale); break;
      case Relation::greater_equal: worst = std::max(worst, (row.rhs - act) / scale); break;
      case Relation::equal: worst = std::max(worst, std::abs(act - row.rhs) / scale); break;
    }
  }
  return worst;
}

inline double integrality_violation(const MixedIntegerProgram& mip, std::span<const double> x) {
  double worst = 0.0;
  for (int j = 0; j < mip.base.num_vars; ++j)
    if (mip.kind[j] != VarKind::continuous)
      worst = std::max(worst, std::abs(x[j] - std::round(x[j])));
  return worst;
}

struct BoundChange {
  std::shared_ptr<const BoundChange> parent;
  int var;
  double lb, ub;
};

struct Node {
  std::shared_ptr<const BoundChange> changes;
  double bound;  // internal max-form LP bound inherited from the parent
  long id;
  int depth;
};

struct NodeOrder {
  bool operator()(const Node& a, const Node& b) const {
    if (a.bound != b.bound) return a.bound < b.bound;  // larger bound first
    return a.id > b.id;                                // then FIFO
  }
};

}  // namespace detail

class BranchAndBound {
 public:
  BranchAndBound(const MixedIntegerProgram& mip, const MipConfig& cfg)
      : mip_(mip), cfg_(cfg) {
    mip.validate();
    if (cfg.gap_target < 0.0 || cfg.gap_target >= 1.0)
      throw MalformedProgram("gap_target must lie in [0, 1)");
    internal_ = mip.base;
    if (internal_.sense == Sense::minimize) {
      flip_ = true;
      internal_.sense = Sense::maximize;
      for (auto& c : internal_.objective) c = -c;
      internal_.objective_offset = -internal_.objective_offset;
    }
    // Integer domains snap to integral bounds up front.
    for (int j = 0; j < internal_.num_vars; ++j) {
      if (mip.kind[j] == VarKind::continuous) continue;
      internal_.lower[j] = std::ceil(internal_.lower[j] - cfg.tol.integrality);
      internal_.upper[j] = std::floor(internal_.upper[j] + cfg.tol.integrality);
    }
  }

  MipSolution solve(std::span<const double> warm_start = {}) {
    start_ = std::chrono::steady_clock::now();
    incumbent_.clear();
    has_incumbent_ = false;
    nodes_explored_ = 0;
    next_id_ = 0;
    stop_ = Stop::none;
    pruned_bounds_.clear();
    worker_error_ = nullptr;
    while (!queue_.empty()) queue_.pop();
    in_flight_.clear();

    if (!warm_start.empty()) try_incumbent(std::vector<double>(warm_start.begin(), warm_start.end()));

    queue_.push(detail::Node{nullptr, std::numeric_limits<double>::infinity(), next_id_++, 0});

    const int workers = std::max(1, cfg_.workers);
    if (workers == 1) {
      worker_loop();
    } else {
      std::vector<std::thread> pool;
      pool.reserve(workers);
      for (int t = 0; t < workers; ++t)
        pool.emplace_back([this] {
          try {
            worker_loop();
          } catch (...) {
            std::lock_guard lk(mu_);
            if (!worker_error_) worker_error_ = std::current_exception();
            stop_ = Stop::time;  // any stop reason unblocks the others
            cv_.notify_all();
          }
        });
      for (auto& th : pool) th.join();
      if (worker_error_) std::rethrow_exception(worker_error_);
    }
    return collect();
  }

 private:
  enum class Stop { none, gap, nodes, time };

  const MixedIntegerProgram& mip_;
  MipConfig cfg_;
  LinearProgram internal_;  // max form
  bool flip_ = false;

  std::mutex mu_;
  std::condition_variable cv_;
  std::priority_queue<detail::Node, std::vector<detail::Node>, detail::NodeOrder> queue_;
  std::multiset<double> in_flight_;
  std::vector<double> incumbent_;
  double inc_value_ = -std::numeric_limits<double>::infinity();
  bool has_incumbent_ = false;
  long nodes_explored_ = 0;
  long next_id_ = 0;
  Stop stop_ = Stop::none;
  std::vector<double> pruned_bounds_;
  std::chrono::steady_clock::time_point start_;
  int active_workers_ = 0;
  std::exception_ptr worker_error_;

  double elapsed() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

  double global_bound_locked() const {
    double b = has_incumbent_ ? inc_value_ : -std::numeric_limits<double>::infinity();
    if (!queue_.empty()) b = std::max(b, queue_.top().bound);
    if (!in_flight_.empty()) b = std::max(b, *in_flight_.rbegin());
    return b;
  }

  double gap_locked() const {
    if (!has_incumbent_) return std::numeric_limits<double>::infinity();
    const double b = global_bound_locked();
    if (!std::isfinite(b)) return std::numeric_limits<double>::infinity();
    return std::abs(b - inc_value_) / std::max(1.0, std::abs(inc_value_));
  }

  bool try_incumbent(std::vector<double> x) {
    if (static_cast<int>(x.size()) != internal_.num_vars) return false;
    for (int j = 0; j < internal_.num_vars; ++j)
      if (mip_.kind[j] != VarKind::continuous) x[j] = std::round(x[j]);
    if (detail::relative_violation(mip_.base, x) > cfg_.tol.feasibility) return false;
    const double v = internal_.eval_objective(x);
    std::lock_guard lk(mu_);
    if (!has_incumbent_ || v > inc_value_) {
      incumbent_ = std::move(x);
      inc_value_ = v;
      has_incumbent_ = true;
      return true;
    }
    return false;
  }

  void materialize(const detail::Node& node, std::vector<double>& lb,
                   std::vector<double>& ub) const {
    lb = internal_.lower;
    ub = internal_.upper;
    std::vector<const detail::BoundChange*> chain;
    for (const detail::BoundChange* c = node.changes.get(); c != nullptr; c = c->parent.get())
      chain.push_back(c);
    for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
      lb[(*it)->var] = (*it)->lb;
      ub[(*it)->var] = (*it)->ub;
    }
  }

  void worker_loop() {
    SimplexSolver solver(internal_, /*validate=*/false);
    std::optional<SimplexSolver::Basis> basis;
    std::vector<double> lb, ub;
    // Plunging state: after branching, one child is kept in hand and solved
    // next, which finds a first incumbent quickly (best-bound alone can
    // starve) and keeps warm starts local. Its bound stays registered in
    // in_flight_ so other workers cannot conclude the tree is exhausted.
    std::optional<detail::Node> in_hand;
    std::multiset<double>::iterator flight_it{};
    int plunge = 0;

    std::unique_lock lk(mu_);
    ++active_workers_;
    while (true) {
      detail::Node node;
      if (in_hand) {
        if (stop_ == Stop::none && nodes_explored_ >= cfg_.node_limit) stop_ = Stop::nodes;
        if (stop_ == Stop::none && elapsed() > cfg_.time_limit_seconds) stop_ = Stop::time;
        if (stop_ == Stop::none && has_incumbent_ && cfg_.gap_target > 0.0 &&
            gap_locked() <= cfg_.gap_target)
          stop_ = Stop::gap;
        if (stop_ != Stop::none) {
          in_flight_.erase(flight_it);
          cv_.notify_all();
          break;
        }
        node = std::move(*in_hand);
        in_hand.reset();
      } else {
        cv_.wait(lk, [&] {
          return stop_ != Stop::none || !queue_.empty() ||
                 (in_flight_.empty() && queue_.empty());
        });
        if (stop_ != Stop::none) break;
        if (queue_.empty()) {
          if (in_flight_.empty()) break;  // exhausted
          continue;
        }
        if (has_incumbent_ && gap_locked() <= cfg_.gap_target && cfg_.gap_target > 0.0) {
          stop_ = Stop::gap;
          break;
        }
        if (nodes_explored_ >= cfg_.node_limit) {
          stop_ = Stop::nodes;
          break;
        }
        if (elapsed() > cfg_.time_limit_seconds) {
          stop_ = Stop::time;
          break;
        }
        node = queue_.top();
        queue_.pop();
        const double prune_eps = 1e-9 * (1.0 + std::abs(inc_value_));
        if (has_incumbent_ && node.bound <= inc_value_ + prune_eps) {
          if (cfg_.audit && std::isfinite(node.bound)) pruned_bounds_.push_back(node.bound);
          continue;
        }
        flight_it = in_flight_.insert(node.bound);
        plunge = 0;
      }
      ++nodes_explored_;
      if (cfg_.trace && nodes_explored_ % 2000 == 0) {
        std::fprintf(stderr, "[bb] nodes=%ld inc=%.6g bound=%.6g gap=%.4f queue=%zu\n",
                     nodes_explored_, has_incumbent_ ? inc_value_ : std::nan(""),
                     global_bound_locked(), gap_locked(), queue_.size());
      }
      lk.unlock();

      double node_bound = 0.0;
      std::vector<detail::Node> children;
      int keep_child = -1;  // index into children to dive on
      std::optional<std::vector<double>> candidate;

      materialize(node, lb, ub);
      LpSolution rel;
      bool infeasible = false;
      try {
        rel = solver.solve(cfg_.tol, lb, ub, basis ? &*basis : nullptr);
        if (rel.status == LpStatus::optimal) basis = solver.last_basis();
      } catch (const NumericalBreakdown&) {
        // retry cold once before giving up on the node
        rel = solver.solve(cfg_.tol, lb, ub, nullptr);
        if (rel.status == LpStatus::optimal) basis = solver.last_basis();
      }
      if (rel.status == LpStatus::infeasible) {
        infeasible = true;
      } else if (rel.status != LpStatus::optimal) {
        throw NumericalBreakdown("node relaxation neither optimal nor infeasible");
      }

      if (!infeasible) {
        node_bound = rel.objective_value;
        int branch_var = -1;
        double branch_score = -1.0;
        for (int j = 0; j < internal_.num_vars; ++j) {
          if (mip_.kind[j] == VarKind::continuous) continue;
          const double f = std::abs(rel.primal[j] - std::round(rel.primal[j]));
          if (f <= cfg_.tol.integrality) continue;
          if (f > branch_score + 1e-12) {
            branch_score = f;
            branch_var = j;
          }
        }
        if (branch_var < 0) {
          candidate = rel.primal;  // integral relaxation: candidate incumbent
        } else {
          // Reduced-cost bound tightening: with an incumbent in hand, a
          // nonbasic integer variable whose one-step objective loss already
          // falls below the incumbent can be fixed at its bound for the
          // whole subtree.
          std::shared_ptr<const detail::BoundChange> base = node.changes;
          {
            std::lock_guard fix_lk(mu_);
            if (has_incumbent_) {
              const double margin = inc_value_ + 1e-9 * (1.0 + std::abs(inc_value_));
              for (int j = 0; j < internal_.num_vars; ++j) {
                if (mip_.kind[j] == VarKind::continuous || j == branch_var) continue;
                if (lb[j] >= ub[j]) continue;
                const double d = rel.reduced_cost[j];
                if (rel.at_bound[j] < 0 && node_bound + d < margin) {
                  base = std::make_shared<detail::BoundChange>(
                      detail::BoundChange{base, j, lb[j], lb[j]});
                } else if (rel.at_bound[j] > 0 && node_bound - d < margin) {
                  base = std::make_shared<detail::BoundChange>(
                      detail::BoundChange{base, j, ub[j], ub[j]});
                }
              }
            }
          }
          const double v = rel.primal[branch_var];
          auto down = std::make_shared<detail::BoundChange>(
              detail::BoundChange{base, branch_var, lb[branch_var], std::floor(v)});
          auto up = std::make_shared<detail::BoundChange>(
              detail::BoundChange{base, branch_var, std::ceil(v), ub[branch_var]});
          children.push_back(detail::Node{down, node_bound, 0, node.depth + 1});
          children.push_back(detail::Node{up, node_bound, 0, node.depth + 1});
          // dive toward the side the relaxation already leans to
          keep_child = (v - std::floor(v)) >= 0.5 ? 1 : 0;
        }
      }

      if (candidate) try_incumbent(std::move(*candidate));

      lk.lock();
      const double eps2 = 1e-9 * (1.0 + std::abs(inc_value_));
      const bool want_plunge =
          keep_child >= 0 && stop_ == Stop::none &&
          (!has_incumbent_ || plunge < cfg_.plunge_depth) &&
          !(has_incumbent_ && children[keep_child].bound <= inc_value_ + eps2);
      if (want_plunge) {
        detail::Node kept = std::move(children[keep_child]);
        kept.id = next_id_++;
        in_flight_.erase(flight_it);
        flight_it = in_flight_.insert(kept.bound);
        in_hand = std::move(kept);
        ++plunge;
        children.erase(children.begin() + keep_child);
      } else {
        in_flight_.erase(flight_it);
      }
      for (auto& ch : children) {
        if (has_incumbent_ && ch.bound <= inc_value_ + eps2) {
          if (cfg_.audit) pruned_bounds_.push_back(ch.bound);
          continue;
        }
        ch.id = next_id_++;
        queue_.push(std::move(ch));
      }
      cv_.notify_all();
    }
    --active_workers_;
    cv_.notify_all();
  }

  MipSolution collect() {
    std::lock_guard lk(mu_);
    MipSolution out;
    out.nodes_explored = nodes_explored_;
    const double sign = flip_ ? -1.0 : 1.0;
    if (cfg_.audit) {
      out.pruned_bounds.reserve(pruned_bounds_.size());
      for (double b : pruned_bounds_) out.pruned_bounds.push_back(sign * b);
    }
    if (!has_incumbent_) {
      if (stop_ == Stop::none) {
        out.status = MipStatus::infeasible;
        return out;
      }
      throw LimitExceeded(stop_ == Stop::time ? "time limit reached without incumbent"
                                              : "node limit reached without incumbent",
                          /*has_incumbent=*/false);
    }
    out.incumbent = incumbent_;
    out.objective_value = mip_.base.eval_objective(out.incumbent);
    const double internal_bound = global_bound_locked();
    out.bound = std::isfinite(internal_bound) ? sign * internal_bound : out.objective_value;
    out.gap = std::abs(out.bound - out.objective_value) /
              std::max(1.0, std::abs(out.objective_value));
    switch (stop_) {
      case Stop::none: out.status = MipStatus::optimal; out.gap = 0.0; out.bound = out.objective_value; break;
      case Stop::gap: out.status = MipStatus::gap_limit; break;
      case Stop::nodes: out.status = MipStatus::feasible; break;
      case Stop::time: out.status = MipStatus::time_limit; break;
    }
    return out;
  }
};

inline MipSolution solve_mip(const MixedIntegerProgram& mip, const MipConfig& cfg = {},
                             std::span<const double> warm_start = {}) {
  BranchAndBound bb(mip, cfg);
  return bb.solve(warm_start);
}

/// Exhaustive enumeration over the integer domain with interval-arithmetic
/// subtree pruning. `fn` receives each integer-feasible assignment (continuous
/// coordinates completed by an LP when present and completion succeeds).
/// Returns the number of feasible points visited.
template <typename Fn>
long for_each_feasible_assignment(const MixedIntegerProgram& mip, const ToleranceConfig& tol,
                                  std::uint64_t cap, Fn&& fn) {
  mip.validate();
  const LinearProgram& lp = mip.base;
  const int n = lp.num_vars;
  std::vector<int> ints;
  for (int j = 0; j < n; ++j)
    if (mip.kind[j] != VarKind::continuous) ints.push_back(j);
  std::uint64_t space = 1;
  for (int j : ints) {
    const double width = std::floor(lp.upper[j]) - std::ceil(lp.lower[j]) + 1.0;
    if (width <= 0) return 0;  // empty integer domain
    if (width > static_cast<double>(cap) ||
        (space *= static_cast<std::uint64_t>(width)) > cap)
      throw EnumerationTooLarge("integer search space exceeds the enumeration cap");
  }
  const bool has_cont = static_cast<int>(ints.size()) < n;

  // Row activity intervals for the not-yet-assigned suffix plus continuous
  // variables, used to cut provably infeasible subtrees.
  const int m = static_cast<int>(lp.rows.size());
  const int levels = static_cast<int>(ints.size());
  std::vector<int> level_of(n, -1);
  for (int k = 0; k < levels; ++k) level_of[ints[k]] = k;
  std::vector<std::vector<double>> sfx_min(levels + 1, std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> sfx_max(levels + 1, std::vector<double>(m, 0.0));
  for (int i = 0; i < m; ++i) {
    for (const auto& [col, coef] : lp.rows[i].terms) {
      if (mip.kind[col] == VarKind::continuous) {
        const double a = coef * lp.lower[col], b = coef * lp.upper[col];
        for (int k = 0; k <= levels; ++k) {
          sfx_min[k][i] += std::min(a, b);
          sfx_max[k][i] += std::max(a, b);
        }
      }
    }
  }
  for (int k = levels - 1; k >= 0; --k) {
    const int j = ints[k];
    for (int i = 0; i < m; ++i) {
      sfx_min[k][i] = sfx_min[k + 1][i];
      sfx_max[k][i] = sfx_max[k + 1][i];
    }
    for (int i = 0; i < m; ++i) {
      for (const auto& [col, coef] : lp.rows[i].terms) {
        if (col != j) continue;
        const double a = coef * lp.lower[col], b = coef * lp.upper[col];
        sfx_min[k][i] += std::min(a, b);
        sfx_max[k][i] += std::max(a, b);
      }
    }
  }

  std::vector<double> x(n, 0.0);
  for (int j = 0; j < n; ++j) x[j] = lp.lower[j];
  std::vector<double> act(m, 0.0);
  std::optional<SimplexSolver> completer;
  if (has_cont) completer.emplace(lp, /*validate=*/false);
  long visited = 0;

  auto feasible_interval = [&](int level) {
    for (int i = 0; i < m; ++i) {
      const double lo = act[i] + sfx_min[level][i];
      const double hi = act[i] + sfx_max[level][i];
      const double t = tol.feasibility * (1.0 + std::abs(lp.rows[i].rhs));
      switch (lp.rows[i].rel) {
        case Relation::less_equal:
          if (lo > lp.rows[i].rhs + t) return false;
          break;
        case Relation::greater_equal:
          if (hi < lp.rows[i].rhs - t) return false;
          break;
        case Relation::equal:
          if (lo > lp.rows[i].rhs + t || hi < lp.rows[i].rhs - t) return false;
          break;
      }
    }
    return true;
  };

  std::vector<std::vector<std::pair<int, double>>> var_rows(n);
  for (int i = 0; i < m; ++i)
    for (const auto& [col, coef] : lp.rows[i].terms) var_rows[col].emplace_back(i, coef);

  auto dfs = [&](auto&& self, int level) -> void {
    if (!feasible_interval(level)) return;
    if (level == levels) {
      if (has_cont) {
        // Optimal completion of the continuous part under the fixed integers,
        // so callers see the best representative of each integer assignment.
        std::vector<double> lb(lp.lower), ub(lp.upper);
        for (int j : ints) lb[j] = ub[j] = x[j];
        auto sol = completer->solve(tol, lb, ub);
        if (sol.status != LpStatus::optimal) return;
        for (int j = 0; j < n; ++j)
          if (mip.kind[j] == VarKind::continuous) x[j] = sol.primal[j];
      }
      ++visited;
      fn(std::span<const double>(x));
      return;
    }
    const int j = ints[level];
    const long lo = static_cast<long>(std::ceil(lp.lower[j]));
    const long hi = static_cast<long>(std::floor(lp.upper[j]));
    for (long v = lo; v <= hi; ++v) {
      const double val = static_cast<double>(v);
      x[j] = val;
      for (const auto& [i, coef] : var_rows[j]) act[i] += coef * val;
      self(self, level + 1);
      for (const auto& [i, coef] : var_rows[j]) act[i] -= coef * val;
    }
    x[j] = lp.lower[j];
  };
  dfs(dfs, 0);
  return visited;
}

/// True optimum by exhaustive enumeration. Test and acceptance oracle; also
/// the reference behind the gap_target = 0 equivalence property.
inline MipSolution brute_force_solve(const MixedIntegerProgram& mip,
                                     const ToleranceConfig& tol = {},
                                     std::uint64_t cap = std::uint64_t{1} << 20) {
  MipSolution out;
  const bool maximize = mip.base.sense == Sense::maximize;
  double best = maximize ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
  // With continuous variables present the completion LP must optimize the
  // true objective restricted to the fixed integer part, not just find any
  // feasible completion; run the enumeration on a copy that keeps the
  // objective and let the LP do the inner optimization.
  long count = for_each_feasible_assignment(
      mip, tol, cap, [&](std::span<const double> x) {
        const double v = mip.base.eval_objective(x);
        if ((maximize && v > best) || (!maximize && v < best)) {
          best = v;
          out.incumbent.assign(x.begin(), x.end());
        }
      });
  if (count == 0 || out.incumbent.empty()) {
    out.status = MipStatus::infeasible;
    return out;
  }
  out.status = MipStatus::optimal;
  out.objective_value = best;
  out.bound = best;
  out.gap = 0.0;
  out.nodes_explored = count;
  return out;
}

}  // namespace bcropt
