#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>
#include <vector>

#include "cashmgmt/formulate.hpp"
#include "cashmgmt/model.hpp"
#include "cashmgmt/simplex.hpp"

namespace cashmgmt {

struct BnbOptions {
  double abs_gap = 1e-6;
  double rel_gap = 1e-9;
  std::size_t max_nodes = 100'000;
  std::size_t max_lp_iterations = kDefaultMaxIterations;
};

inline constexpr double kIntegralityTolerance = 1e-6;

enum class MilpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

struct MilpResult {
  MilpStatus status = MilpStatus::Infeasible;
  std::vector<double> values;  // empty when no incumbent was found
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;

  bool has_incumbent() const noexcept { return !values.empty(); }
};

namespace detail {

inline void check_bnb_options(const BnbOptions& options) {
  if (!(options.abs_gap >= 0.0) || !(options.rel_gap >= 0.0)) {
    throw std::invalid_argument("BnbOptions: gaps must be nonnegative");
  }
  if (options.max_nodes < 1) throw std::invalid_argument("BnbOptions: max_nodes must be at least 1");
}

// Branch-and-bound over the binary variables of a MilpModel. Nodes carry
// the fixings of the binaries and the LP bound of their parent; the open
// node with the lowest parent bound is processed first, ties going to the
// node created earliest. The down branch is always created first.
class BranchAndBound {
 public:
  BranchAndBound(const MilpModel& model, const BnbOptions& options)
      : model_(model), options_(options), lp_(model.relaxation) {
    for (std::size_t k = 0; k < model.num_vars(); ++k) {
      if (!model.integrality[k]) continue;
      if (model.relaxation.lower[k] < 0.0 || model.relaxation.upper[k] > 1.0) {
        throw std::invalid_argument("solve_milp: binary variable " + std::to_string(k) +
                                    " has bounds outside [0, 1]");
      }
      binaries_.push_back(k);
    }
  }

  MilpResult run() {
    MilpResult result;
    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    open.push(Node{-kInfinity, next_id_++, std::vector<std::int8_t>(binaries_.size(), kFree)});
    bool truncated = false;

    while (!open.empty()) {
      Node node = open.top();
      open.pop();
      if (prunable(node.parent_bound)) continue;
      if (result.nodes >= options_.max_nodes) {
        truncated = true;
        break;
      }
      ++result.nodes;

      const LpSolution lp = solve_node(node.fixings, result);
      if (lp.status == LpStatus::Infeasible) continue;
      if (lp.status == LpStatus::IterationLimit) {
        truncated = true;
        continue;
      }
      if (lp.status == LpStatus::Unbounded) {
        result.status = MilpStatus::Unbounded;
        result.values.clear();
        return result;
      }
      if (prunable(lp.objective)) continue;

      const std::size_t branch = most_fractional(lp.values);
      if (branch == binaries_.size()) {
        if (!try_incumbent(lp.values, node.fixings, result)) {
          const std::size_t fallback = first_inexact(lp.values, node.fixings);
          if (fallback < binaries_.size()) push_children(open, node, fallback, lp.objective);
        }
        continue;
      }
      push_children(open, node, branch, lp.objective);
    }

    if (truncated) {
      result.status = MilpStatus::IterationLimit;
    } else {
      result.status = result.has_incumbent() ? MilpStatus::Optimal : MilpStatus::Infeasible;
    }
    return result;
  }

 private:
  static constexpr std::int8_t kFree = -1;

  struct Node {
    double parent_bound;
    std::uint64_t id;
    std::vector<std::int8_t> fixings;
  };

  struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
      if (a.parent_bound != b.parent_bound) return a.parent_bound > b.parent_bound;
      return a.id > b.id;
    }
  };

  bool prunable(double bound) const {
    if (!std::isfinite(incumbent_)) return false;
    const double gap = std::max(options_.abs_gap, options_.rel_gap * std::abs(incumbent_));
    return bound >= incumbent_ - gap;
  }

  LpSolution solve_node(const std::vector<std::int8_t>& fixings, MilpResult& result) {
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      const std::size_t var = binaries_[k];
      if (fixings[k] == kFree) {
        lp_.lower[var] = model_.relaxation.lower[var];
        lp_.upper[var] = model_.relaxation.upper[var];
      } else {
        lp_.lower[var] = lp_.upper[var] = fixings[k];
      }
    }
    LpSolution lp = solve_lp(lp_, options_.max_lp_iterations);
    result.lp_iterations += lp.iterations;
    return lp;
  }

  // Binary with value closest to 0.5 among those off integrality; ties go to
  // the lowest flat index. Returns binaries_.size() when all are integral.
  std::size_t most_fractional(const std::vector<double>& values) const {
    std::size_t best = binaries_.size();
    double best_distance = kInfinity;
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      const double v = values[binaries_[k]];
      const double frac = std::min(v, 1.0 - v);
      if (frac <= kIntegralityTolerance) continue;
      const double distance = std::abs(v - 0.5);
      if (distance < best_distance) {
        best_distance = distance;
        best = k;
      }
    }
    return best;
  }

  std::size_t first_inexact(const std::vector<double>& values,
                            const std::vector<std::int8_t>& fixings) const {
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      if (fixings[k] != kFree) continue;
      const double v = values[binaries_[k]];
      if (v != 0.0 && v != 1.0) return k;
    }
    return binaries_.size();
  }

  // Snaps the binaries and re-solves with them fixed so the accepted point
  // satisfies every row exactly rather than up to the rounding.
  bool try_incumbent(const std::vector<double>& values, const std::vector<std::int8_t>& fixings,
                     MilpResult& result) {
    std::vector<std::int8_t> snapped(fixings);
    bool exact = true;
    for (std::size_t k = 0; k < binaries_.size(); ++k) {
      const double v = values[binaries_[k]];
      snapped[k] = v >= 0.5 ? 1 : 0;
      if (v != static_cast<double>(snapped[k])) exact = false;
    }
    LpSolution lp;
    if (exact) {
      lp.status = LpStatus::Optimal;
      lp.values = values;
      lp.objective = evaluate_objective(lp_, values);
    } else {
      lp = solve_node(snapped, result);
      if (lp.status != LpStatus::Optimal) return false;
      for (std::size_t k = 0; k < binaries_.size(); ++k) {
        lp.values[binaries_[k]] = snapped[k];
      }
    }
    if (lp.objective < incumbent_) {
      incumbent_ = lp.objective;
      result.values = std::move(lp.values);
      result.objective = lp.objective;
    }
    return true;
  }

  void push_children(std::priority_queue<Node, std::vector<Node>, NodeOrder>& open, const Node& node,
                     std::size_t branch, double bound) {
    Node down{bound, next_id_++, node.fixings};
    down.fixings[branch] = 0;
    Node up{bound, next_id_++, node.fixings};
    up.fixings[branch] = 1;
    open.push(std::move(down));
    open.push(std::move(up));
  }

  const MilpModel& model_;
  BnbOptions options_;
  LpProblem lp_;
  std::vector<std::size_t> binaries_;
  double incumbent_ = kInfinity;
  std::uint64_t next_id_ = 0;
};

}  // namespace detail

inline MilpResult solve_milp(const MilpModel& model, const BnbOptions& options = {}) {
  detail::check_bnb_options(options);
  if (model.integrality.size() != model.num_vars()) {
    throw std::invalid_argument("solve_milp: integrality mask does not match num_vars");
  }
  detail::check_lp_shape(model.relaxation);
  return detail::BranchAndBound(model, options).run();
}

namespace detail {

inline Solution decode_solution(const ProblemInstance& instance, const FormulatedModel& formulated,
                                const MilpResult& milp) {
  Solution solution;
  solution.stats.nodes = milp.nodes;
  solution.stats.lp_iterations = milp.lp_iterations;
  switch (milp.status) {
    case MilpStatus::Optimal: solution.status = SolveStatus::Optimal; break;
    case MilpStatus::Infeasible: solution.status = SolveStatus::Infeasible; break;
    case MilpStatus::IterationLimit: solution.status = SolveStatus::IterationLimit; break;
    case MilpStatus::Unbounded:
      throw std::logic_error("cash management model reported unbounded");
  }
  if (!milp.has_incumbent()) return solution;

  DecodedAssignment decoded = decode(formulated.map, milp.values);
  solution.policy = std::move(decoded.policy);
  solution.balances = std::move(decoded.balances);
  solution.deviations = std::move(decoded.deviations);
  solution.objective = milp.objective;
  solution.period_costs = policy_cost_total(solution.policy, solution.balances, instance.costs).per_period;
  return solution;
}

template <typename Clock = std::chrono::steady_clock>
double elapsed_ms(typename Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

}  // namespace detail

/// Minimum-cost policy. Infeasible solutions carry no policy.
inline Solution solve_cost(const ProblemInstance& instance, const BnbOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  const FormulatedModel formulated = build_cost_model(instance);
  const MilpResult milp = solve_milp(formulated.model, options);
  Solution solution = detail::decode_solution(instance, formulated, milp);
  solution.stats.wall_time_ms = detail::elapsed_ms(start);
  return solution;
}

/// Weighted cost-risk policy; deviations hold the per-period excess over
/// the cost reference. Budgets that cannot be met give Infeasible.
inline Solution solve_risk(const ProblemInstance& instance, const RiskParams& risk,
                           const BnbOptions& options = {}) {
  const auto start = std::chrono::steady_clock::now();
  const FormulatedModel formulated = build_cost_risk_model(instance, risk);
  const MilpResult milp = solve_milp(formulated.model, options);
  Solution solution = detail::decode_solution(instance, formulated, milp);
  solution.stats.wall_time_ms = detail::elapsed_ms(start);
  return solution;
}

}  // namespace cashmgmt
