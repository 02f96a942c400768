#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cashmgmt/model.hpp"
#include "cashmgmt/simplex.hpp"

namespace cashmgmt {

// 2^16 LP solves is the most the oracle will attempt.
inline constexpr std::size_t kOracleMaxBinaries = 16;

struct OracleOptimum {
  double objective = 0.0;
  Policy policy;
  BalancePath balances;
  std::vector<double> deviations;  // empty for the cost program
  std::uint64_t pattern = 0;       // bit t*n + i set when transfer (t, i) is active
  std::size_t lp_solves = 0;
};

namespace detail {

// Exhaustive search over indicator patterns. For each pattern the
// transfers switched off are fixed at zero, the ones switched on are left
// unbounded above, and the remaining LP is solved on its own layout
// [x (horizon*n) | b (horizon*m) | delta (horizon)]. No big-M is involved,
// so the result is the optimum of the untransformed program.
class PatternEnumerator {
 public:
  PatternEnumerator(const ProblemInstance& instance, const RiskParams* risk)
      : instance_(instance), risk_(risk) {
    require_valid(validate_instance(instance), "problem instance");
    if (risk) require_valid(validate_risk(*risk), "risk parameters");
    n_ = instance.system.num_transactions();
    m_ = instance.system.num_accounts();
    horizon_ = instance.horizon;
    const std::size_t binaries = n_ * horizon_;
    if (binaries > kOracleMaxBinaries) {
      throw std::invalid_argument("oracle: " + std::to_string(binaries) +
                                  " indicator variables exceed the cap of " +
                                  std::to_string(kOracleMaxBinaries));
    }
    build_template();
  }

  std::optional<OracleOptimum> run() {
    const std::uint64_t patterns = std::uint64_t{1} << (n_ * horizon_);
    std::optional<OracleOptimum> best;
    std::size_t lp_solves = 0;
    for (std::uint64_t mask = 0; mask < patterns; ++mask) {
      const double fixed = fixed_cost(mask);
      if (risk_ && fixed > risk_->cost_budget) continue;
      const double fixed_term = risk_ ? fixed * risk_->cost_weight / risk_->cost_budget : fixed;
      if (best && fixed_term > best->objective) continue;

      LpProblem lp = lp_;
      apply_pattern(mask, lp);
      const LpSolution solution = solve_lp(lp);
      ++lp_solves;
      if (solution.status == LpStatus::Infeasible) continue;
      if (solution.status != LpStatus::Optimal) {
        throw std::runtime_error(std::string("oracle: pattern LP ended with status ") +
                                 to_string(solution.status));
      }
      const double objective = solution.objective + fixed_term;
      if (!best || objective < best->objective - 1e-12) {
        best = extract(solution.values, objective, mask);
      }
    }
    if (best) best->lp_solves = lp_solves;
    return best;
  }

 private:
  std::size_t x_index(std::size_t t, std::size_t i) const { return t * n_ + i; }
  std::size_t b_index(std::size_t t, std::size_t j) const { return horizon_ * n_ + t * m_ + j; }
  std::size_t d_index(std::size_t t) const { return horizon_ * (n_ + m_) + t; }
  bool active(std::uint64_t mask, std::size_t t, std::size_t i) const {
    return (mask >> x_index(t, i)) & 1U;
  }

  double period_fixed_cost(std::uint64_t mask, std::size_t t) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      if (active(mask, t, i)) sum += instance_.costs.fixed[i];
    }
    return sum;
  }

  double fixed_cost(std::uint64_t mask) const {
    double sum = 0.0;
    for (std::size_t t = 0; t < horizon_; ++t) sum += period_fixed_cost(mask, t);
    return sum;
  }

  void build_template() {
    const std::size_t num_vars = horizon_ * (n_ + m_) + (risk_ ? horizon_ : 0);
    lp_.num_vars = num_vars;
    lp_.objective.assign(num_vars, 0.0);
    lp_.lower.assign(num_vars, 0.0);
    lp_.upper.assign(num_vars, kInfinity);
    const double scale = risk_ ? risk_->cost_weight / risk_->cost_budget : 1.0;

    LinearConstraint cost_budget{{}, Relation::LessEqual, 0.0};
    LinearConstraint risk_budget{{}, Relation::LessEqual, 0.0};
    for (std::size_t t = 0; t < horizon_; ++t) {
      std::vector<Term> variable_cost;
      for (std::size_t i = 0; i < n_; ++i) {
        variable_cost.push_back({x_index(t, i), instance_.costs.variable[i]});
      }
      for (std::size_t j = 0; j < m_; ++j) {
        lp_.lower[b_index(t, j)] = instance_.min_balance[j];
        variable_cost.push_back({b_index(t, j), instance_.costs.holding[j]});
      }
      for (const Term& term : variable_cost) lp_.objective[term.var] += scale * term.coef;

      // b_{t-1} + f_t + sum_i a_ij x_i = b_t
      for (std::size_t j = 0; j < m_; ++j) {
        LinearConstraint row{{}, Relation::Equal, 0.0};
        row.terms.push_back({b_index(t, j), 1.0});
        for (std::size_t i = 0; i < n_; ++i) {
          const int a = instance_.system.incidence(i, j);
          if (a != 0) row.terms.push_back({x_index(t, i), -static_cast<double>(a)});
        }
        if (t == 0) {
          row.rhs = instance_.initial_balance[j] + instance_.forecasts(t, j);
        } else {
          row.terms.push_back({b_index(t - 1, j), -1.0});
          row.rhs = instance_.forecasts(t, j);
        }
        lp_.constraints.push_back(std::move(row));
      }

      if (risk_) {
        LinearConstraint deviation{variable_cost, Relation::LessEqual, risk_->cost_ref};
        deviation.terms.push_back({d_index(t), -1.0});
        deviation_rows_.push_back(lp_.constraints.size());
        lp_.constraints.push_back(std::move(deviation));
        cost_budget.terms.insert(cost_budget.terms.end(), variable_cost.begin(), variable_cost.end());
        risk_budget.terms.push_back({d_index(t), 1.0});
        lp_.objective[d_index(t)] = risk_->risk_weight / risk_->risk_budget;
      }
    }
    if (risk_) {
      cost_budget_row_ = lp_.constraints.size();
      cost_budget.rhs = risk_->cost_budget;
      lp_.constraints.push_back(std::move(cost_budget));
      risk_budget.rhs = risk_->risk_budget;
      lp_.constraints.push_back(std::move(risk_budget));
    }
  }

  void apply_pattern(std::uint64_t mask, LpProblem& lp) const {
    for (std::size_t t = 0; t < horizon_; ++t) {
      for (std::size_t i = 0; i < n_; ++i) {
        lp.upper[x_index(t, i)] = active(mask, t, i) ? kInfinity : 0.0;
      }
    }
    if (!risk_) return;
    for (std::size_t t = 0; t < horizon_; ++t) {
      lp.constraints[deviation_rows_[t]].rhs = risk_->cost_ref - period_fixed_cost(mask, t);
    }
    lp.constraints[cost_budget_row_].rhs = risk_->cost_budget - fixed_cost(mask);
  }

  OracleOptimum extract(const std::vector<double>& values, double objective, std::uint64_t mask) const {
    OracleOptimum out;
    out.objective = objective;
    out.pattern = mask;
    out.policy.actions = DenseMatrix(horizon_, n_);
    out.balances.balances = DenseMatrix(horizon_, m_);
    for (std::size_t t = 0; t < horizon_; ++t) {
      for (std::size_t i = 0; i < n_; ++i) {
        const double x = values[x_index(t, i)];
        out.policy.actions(t, i) = x > kIndicatorThreshold ? x : 0.0;
      }
      for (std::size_t j = 0; j < m_; ++j) out.balances.balances(t, j) = values[b_index(t, j)];
      if (risk_) out.deviations.push_back(std::max(0.0, values[d_index(t)]));
    }
    return out;
  }

  const ProblemInstance& instance_;
  const RiskParams* risk_;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t horizon_ = 0;
  LpProblem lp_;
  std::vector<std::size_t> deviation_rows_;
  std::size_t cost_budget_row_ = 0;
};

}  // namespace detail

/// Exact optimum of the cost program by enumerating every indicator
/// pattern. Returns nullopt when no pattern is feasible.
inline std::optional<OracleOptimum> oracle_solve_cost(const ProblemInstance& instance) {
  return detail::PatternEnumerator(instance, nullptr).run();
}

inline std::optional<OracleOptimum> oracle_solve_risk(const ProblemInstance& instance,
                                                      const RiskParams& risk) {
  return detail::PatternEnumerator(instance, &risk).run();
}

}  // namespace cashmgmt
