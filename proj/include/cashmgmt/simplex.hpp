#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace cashmgmt {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
  std::size_t var;
  double coef;

  bool operator==(const Term&) const = default;
};

struct LinearConstraint {
  std::vector<Term> terms;
  Relation relation = Relation::LessEqual;
  double rhs = 0.0;

  bool operator==(const LinearConstraint&) const = default;
};

/// minimize objective . y + objective_offset
/// subject to the constraints and lower <= y <= upper.
/// Lower bounds must be finite; upper bounds may be +infinity.
struct LpProblem {
  std::size_t num_vars = 0;
  std::vector<double> objective;
  double objective_offset = 0.0;
  std::vector<double> lower;
  std::vector<double> upper;
  std::vector<LinearConstraint> constraints;

  bool operator==(const LpProblem&) const = default;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, IterationLimit };

inline const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::Optimal: return "Optimal";
    case LpStatus::Infeasible: return "Infeasible";
    case LpStatus::Unbounded: return "Unbounded";
    case LpStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

struct LpSolution {
  LpStatus status = LpStatus::Infeasible;
  std::vector<double> values;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::size_t iterations = 0;
};

inline constexpr double kPivotTolerance = 1e-9;
inline constexpr double kPrimalFeasibilityTolerance = 1e-7;
inline constexpr double kReducedCostTolerance = 1e-9;
inline constexpr std::size_t kDefaultMaxIterations = 50'000;
// Dantzig pricing gives way to Bland's rule after this many degenerate pivots.
inline constexpr std::size_t kBlandSwitchThreshold = 1'000;

inline double row_activity(const LinearConstraint& row, const std::vector<double>& values) {
  double sum = 0.0;
  for (const Term& term : row.terms) sum += term.coef * values[term.var];
  return sum;
}

// Amount by which `values` violates the row (0 when satisfied).
inline double row_violation(const LinearConstraint& row, const std::vector<double>& values) {
  const double activity = row_activity(row, values);
  switch (row.relation) {
    case Relation::LessEqual: return std::max(0.0, activity - row.rhs);
    case Relation::GreaterEqual: return std::max(0.0, row.rhs - activity);
    case Relation::Equal: return std::abs(activity - row.rhs);
  }
  return 0.0;
}

inline double max_row_violation(const LpProblem& lp, const std::vector<double>& values) {
  double worst = 0.0;
  for (const auto& row : lp.constraints) worst = std::max(worst, row_violation(row, values));
  return worst;
}

inline double max_bound_violation(const LpProblem& lp, const std::vector<double>& values) {
  double worst = 0.0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    worst = std::max(worst, lp.lower[j] - values[j]);
    if (std::isfinite(lp.upper[j])) worst = std::max(worst, values[j] - lp.upper[j]);
  }
  return worst;
}

inline double evaluate_objective(const LpProblem& lp, const std::vector<double>& values) {
  double sum = lp.objective_offset;
  for (std::size_t j = 0; j < lp.num_vars; ++j) sum += lp.objective[j] * values[j];
  return sum;
}

namespace detail {

// Two-phase bounded-variable primal simplex on a dense tableau.
//
// Columns are the structural variables shifted to a zero lower bound, one
// slack per inequality row and one artificial per row that has no slack
// usable as an initial basic variable. Every nonbasic column sits at its
// lower (0) or upper bound.
class BoundedSimplex {
 public:
  BoundedSimplex(const LpProblem& lp, std::size_t max_iters) : lp_(lp), max_iters_(max_iters) {}

  LpSolution run() {
    LpSolution result;
    if (trivially_infeasible_bounds()) {
      result.status = LpStatus::Infeasible;
      return result;
    }
    setup();

    if (num_artificial_ > 0) {
      std::vector<double> phase1_cost(num_cols_, 0.0);
      for (std::size_t k = first_artificial_; k < num_cols_; ++k) phase1_cost[k] = 1.0;
      const LpStatus phase1 = iterate(phase1_cost, /*phase_one=*/true);
      result.iterations = iterations_;
      if (phase1 == LpStatus::IterationLimit) {
        result.status = phase1;
        return result;
      }
      refresh_basic_values();
      double infeasibility = 0.0;
      for (std::size_t i = 0; i < num_rows_; ++i) {
        if (basis_[i] >= first_artificial_) infeasibility += std::max(0.0, beta_[i]);
      }
      if (infeasibility > kPrimalFeasibilityTolerance) {
        result.status = LpStatus::Infeasible;
        return result;
      }
      for (std::size_t k = first_artificial_; k < num_cols_; ++k) upper_[k] = 0.0;
    }

    const LpStatus phase2 = iterate(cost_, /*phase_one=*/false);
    result.iterations = iterations_;
    if (phase2 != LpStatus::Optimal) {
      result.status = phase2;
      return result;
    }
    refresh_basic_values();
    result.values = structural_values();
    result.objective = evaluate_objective(lp_, result.values);
    result.status = LpStatus::Optimal;
    return result;
  }

 private:
  enum class ColStatus : std::uint8_t { Basic, AtLower, AtUpper };

  bool trivially_infeasible_bounds() const {
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      if (lp_.lower[j] > lp_.upper[j] + kPrimalFeasibilityTolerance) return true;
    }
    return false;
  }

  double& tab(std::size_t r, std::size_t c) { return tableau_[r * num_cols_ + c]; }
  double tab(std::size_t r, std::size_t c) const { return tableau_[r * num_cols_ + c]; }
  double& orig(std::size_t r, std::size_t c) { return original_[r * num_cols_ + c]; }
  double orig(std::size_t r, std::size_t c) const { return original_[r * num_cols_ + c]; }

  void setup() {
    const std::size_t n = lp_.num_vars;
    num_rows_ = lp_.constraints.size();

    std::size_t num_slack = 0;
    for (const auto& row : lp_.constraints) {
      if (row.relation != Relation::Equal) ++num_slack;
    }

    // Shifted right-hand sides and the sign each row is multiplied by so
    // that the rhs becomes nonnegative.
    std::vector<double> rhs(num_rows_);
    std::vector<double> sign(num_rows_, 1.0);
    std::vector<double> slack_coef(num_rows_, 0.0);
    std::vector<bool> needs_artificial(num_rows_, false);
    for (std::size_t i = 0; i < num_rows_; ++i) {
      const auto& row = lp_.constraints[i];
      double shifted = row.rhs;
      for (const Term& term : row.terms) shifted -= term.coef * lp_.lower[term.var];
      if (row.relation == Relation::LessEqual) slack_coef[i] = 1.0;
      if (row.relation == Relation::GreaterEqual) slack_coef[i] = -1.0;
      if (shifted < 0.0) sign[i] = -1.0;
      rhs[i] = sign[i] * shifted;
      needs_artificial[i] = sign[i] * slack_coef[i] <= 0.0;
    }
    num_artificial_ = static_cast<std::size_t>(
        std::count(needs_artificial.begin(), needs_artificial.end(), true));
    first_artificial_ = n + num_slack;
    num_cols_ = first_artificial_ + num_artificial_;

    original_.assign(num_rows_ * num_cols_, 0.0);
    upper_.assign(num_cols_, kInfinity);
    cost_.assign(num_cols_, 0.0);
    status_.assign(num_cols_, ColStatus::AtLower);
    basis_.assign(num_rows_, 0);
    rhs_ = rhs;

    for (std::size_t j = 0; j < n; ++j) {
      upper_[j] = std::isfinite(lp_.upper[j]) ? std::max(0.0, lp_.upper[j] - lp_.lower[j]) : kInfinity;
      cost_[j] = lp_.objective[j];
    }

    std::size_t next_slack = n;
    std::size_t next_artificial = first_artificial_;
    for (std::size_t i = 0; i < num_rows_; ++i) {
      for (const Term& term : lp_.constraints[i].terms) orig(i, term.var) += sign[i] * term.coef;
      std::size_t slack = num_cols_;
      if (slack_coef[i] != 0.0) {
        slack = next_slack++;
        orig(i, slack) = sign[i] * slack_coef[i];
      }
      if (needs_artificial[i]) {
        const std::size_t art = next_artificial++;
        orig(i, art) = 1.0;
        basis_[i] = art;
      } else {
        basis_[i] = slack;
      }
      status_[basis_[i]] = ColStatus::Basic;
    }

    tableau_ = original_;
    beta_ = rhs;
  }

  // Reduced costs d_j = c_j - c_B . T_j.
  std::vector<double> reduced_costs(const std::vector<double>& cost) const {
    std::vector<double> d(cost);
    for (std::size_t i = 0; i < num_rows_; ++i) {
      const double cb = cost[basis_[i]];
      if (cb == 0.0) continue;
      const double* row = &tableau_[i * num_cols_];
      for (std::size_t j = 0; j < num_cols_; ++j) d[j] -= cb * row[j];
    }
    for (std::size_t i = 0; i < num_rows_; ++i) d[basis_[i]] = 0.0;
    return d;
  }

  bool is_improving(std::size_t j, double dj) const {
    if (status_[j] == ColStatus::Basic || upper_[j] <= 0.0) return false;
    if (status_[j] == ColStatus::AtLower) return dj < -kReducedCostTolerance;
    return dj > kReducedCostTolerance;
  }

  std::size_t choose_entering(const std::vector<double>& d) const {
    std::size_t best = num_cols_;
    double best_score = 0.0;
    for (std::size_t j = 0; j < num_cols_; ++j) {
      if (!is_improving(j, d[j])) continue;
      if (bland_) return j;
      const double score = std::abs(d[j]);
      if (score > best_score) {
        best_score = score;
        best = j;
      }
    }
    return best;
  }

  LpStatus iterate(const std::vector<double>& cost, bool phase_one) {
    std::vector<double> d = reduced_costs(cost);
    while (true) {
      std::size_t entering = choose_entering(d);
      if (entering == num_cols_) {
        // Confirm against freshly computed reduced costs before stopping.
        d = reduced_costs(cost);
        entering = choose_entering(d);
        if (entering == num_cols_) return LpStatus::Optimal;
      }
      if (iterations_ >= max_iters_) return LpStatus::IterationLimit;
      ++iterations_;

      const double dir = status_[entering] == ColStatus::AtLower ? 1.0 : -1.0;

      // Ratio test.
      double theta = upper_[entering];
      for (std::size_t i = 0; i < num_rows_; ++i) {
        const double alpha = dir * tab(i, entering);
        if (alpha > kPivotTolerance) {
          theta = std::min(theta, std::max(0.0, beta_[i]) / alpha);
        } else if (alpha < -kPivotTolerance && std::isfinite(upper_[basis_[i]])) {
          theta = std::min(theta, std::max(0.0, upper_[basis_[i]] - beta_[i]) / -alpha);
        }
      }
      if (!std::isfinite(theta)) {
        if (phase_one) return LpStatus::Infeasible;  // cannot happen: phase one is bounded
        return LpStatus::Unbounded;
      }

      std::size_t leave_row = num_rows_;
      bool leave_to_upper = false;
      if (theta < upper_[entering]) {
        const double tie = theta + 1e-12;
        double best_alpha = 0.0;
        for (std::size_t i = 0; i < num_rows_; ++i) {
          const double alpha = dir * tab(i, entering);
          double ratio = kInfinity;
          bool to_upper = false;
          if (alpha > kPivotTolerance) {
            ratio = std::max(0.0, beta_[i]) / alpha;
          } else if (alpha < -kPivotTolerance && std::isfinite(upper_[basis_[i]])) {
            ratio = std::max(0.0, upper_[basis_[i]] - beta_[i]) / -alpha;
            to_upper = true;
          }
          if (ratio > tie) continue;
          const bool better = leave_row == num_rows_ ||
                              (bland_ ? basis_[i] < basis_[leave_row]
                                      : std::abs(alpha) > best_alpha);
          if (better) {
            leave_row = i;
            leave_to_upper = to_upper;
            best_alpha = std::abs(alpha);
          }
        }
      }

      if (theta < kPivotTolerance) {
        if (++degenerate_pivots_ >= kBlandSwitchThreshold) bland_ = true;
      }

      for (std::size_t i = 0; i < num_rows_; ++i) beta_[i] -= dir * theta * tab(i, entering);

      if (leave_row == num_rows_) {
        // Entering column moves to its opposite bound; the basis is unchanged.
        status_[entering] =
            status_[entering] == ColStatus::AtLower ? ColStatus::AtUpper : ColStatus::AtLower;
        continue;
      }

      const double entering_value =
          (status_[entering] == ColStatus::AtLower ? 0.0 : upper_[entering]) + dir * theta;
      const std::size_t leaving = basis_[leave_row];
      status_[leaving] = leave_to_upper ? ColStatus::AtUpper : ColStatus::AtLower;
      pivot(leave_row, entering, d);
      basis_[leave_row] = entering;
      status_[entering] = ColStatus::Basic;
      beta_[leave_row] = entering_value;
    }
  }

  void pivot(std::size_t r, std::size_t q, std::vector<double>& d) {
    double* pivot_row = &tableau_[r * num_cols_];
    const double inv = 1.0 / pivot_row[q];
    for (std::size_t j = 0; j < num_cols_; ++j) pivot_row[j] *= inv;
    pivot_row[q] = 1.0;
    for (std::size_t i = 0; i < num_rows_; ++i) {
      if (i == r) continue;
      double* row = &tableau_[i * num_cols_];
      const double factor = row[q];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j < num_cols_; ++j) row[j] -= factor * pivot_row[j];
      row[q] = 0.0;
    }
    const double dq = d[q];
    if (dq != 0.0) {
      for (std::size_t j = 0; j < num_cols_; ++j) d[j] -= dq * pivot_row[j];
    }
    d[q] = 0.0;
  }

  // Recomputes basic values from the original rows: B y_B = rhs - N y_N.
  // Uses Gaussian elimination with partial pivoting; keeps the tableau
  // values when the basis looks singular.
  void refresh_basic_values() {
    const std::size_t m = num_rows_;
    if (m == 0) return;
    std::vector<double> basis_matrix(m * m);
    std::vector<double> rhs(rhs_);
    for (std::size_t j = 0; j < num_cols_; ++j) {
      if (status_[j] != ColStatus::AtUpper) continue;
      for (std::size_t i = 0; i < m; ++i) rhs[i] -= orig(i, j) * upper_[j];
    }
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < m; ++k) basis_matrix[i * m + k] = orig(i, basis_[k]);
    }
    for (std::size_t col = 0; col < m; ++col) {
      std::size_t pivot_row = col;
      double best = std::abs(basis_matrix[col * m + col]);
      for (std::size_t i = col + 1; i < m; ++i) {
        const double v = std::abs(basis_matrix[i * m + col]);
        if (v > best) {
          best = v;
          pivot_row = i;
        }
      }
      if (best < 1e-12) return;
      if (pivot_row != col) {
        for (std::size_t k = 0; k < m; ++k) {
          std::swap(basis_matrix[col * m + k], basis_matrix[pivot_row * m + k]);
        }
        std::swap(rhs[col], rhs[pivot_row]);
      }
      for (std::size_t i = col + 1; i < m; ++i) {
        const double factor = basis_matrix[i * m + col] / basis_matrix[col * m + col];
        if (factor == 0.0) continue;
        for (std::size_t k = col; k < m; ++k) basis_matrix[i * m + k] -= factor * basis_matrix[col * m + k];
        rhs[i] -= factor * rhs[col];
      }
    }
    std::vector<double> solution(m);
    for (std::size_t i = m; i-- > 0;) {
      double sum = rhs[i];
      for (std::size_t k = i + 1; k < m; ++k) sum -= basis_matrix[i * m + k] * solution[k];
      solution[i] = sum / basis_matrix[i * m + i];
    }
    beta_ = std::move(solution);
  }

  std::vector<double> structural_values() const {
    std::vector<double> shifted(num_cols_, 0.0);
    for (std::size_t j = 0; j < num_cols_; ++j) {
      if (status_[j] == ColStatus::AtUpper) shifted[j] = upper_[j];
    }
    for (std::size_t i = 0; i < num_rows_; ++i) shifted[basis_[i]] = beta_[i];
    std::vector<double> values(lp_.num_vars);
    for (std::size_t j = 0; j < lp_.num_vars; ++j) {
      double y = std::max(0.0, shifted[j]);
      if (std::isfinite(upper_[j])) y = std::min(y, upper_[j]);
      values[j] = lp_.lower[j] + y;
    }
    return values;
  }

  const LpProblem& lp_;
  std::size_t max_iters_;
  std::size_t num_rows_ = 0;
  std::size_t num_cols_ = 0;
  std::size_t first_artificial_ = 0;
  std::size_t num_artificial_ = 0;
  std::vector<double> original_;
  std::vector<double> tableau_;
  std::vector<double> rhs_;
  std::vector<double> beta_;
  std::vector<double> upper_;
  std::vector<double> cost_;
  std::vector<ColStatus> status_;
  std::vector<std::size_t> basis_;
  std::size_t iterations_ = 0;
  std::size_t degenerate_pivots_ = 0;
  bool bland_ = false;
};

inline void check_lp_shape(const LpProblem& lp) {
  if (lp.objective.size() != lp.num_vars || lp.lower.size() != lp.num_vars ||
      lp.upper.size() != lp.num_vars) {
    throw std::invalid_argument("solve_lp: objective or bound vectors do not match num_vars");
  }
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    if (!std::isfinite(lp.lower[j])) {
      throw std::invalid_argument("solve_lp: variable " + std::to_string(j) +
                                  " has a non-finite lower bound");
    }
    if (std::isnan(lp.upper[j]) || lp.upper[j] == -kInfinity) {
      throw std::invalid_argument("solve_lp: variable " + std::to_string(j) +
                                  " has an invalid upper bound");
    }
  }
  for (std::size_t i = 0; i < lp.constraints.size(); ++i) {
    for (const Term& term : lp.constraints[i].terms) {
      if (term.var >= lp.num_vars) {
        throw std::invalid_argument("solve_lp: constraint " + std::to_string(i) +
                                    " references unknown variable " + std::to_string(term.var));
      }
    }
  }
}

}  // namespace detail

/// Solves the LP with the two-phase bounded-variable primal simplex method.
/// Deterministic: the same problem always produces the same pivots.
inline LpSolution solve_lp(const LpProblem& problem, std::size_t max_iters = kDefaultMaxIterations) {
  detail::check_lp_shape(problem);
  return detail::BoundedSimplex(problem, max_iters).run();
}

}  // namespace cashmgmt
