#pragma once

#include <algorithm>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "cashmgmt/model.hpp"
#include "cashmgmt/simplex.hpp"

namespace cashmgmt {

/// Solver-facing MILP: the LP relaxation plus a binary mask.
struct MilpModel {
  LpProblem relaxation;
  std::vector<bool> integrality;  // true = binary 0/1 variable
  std::vector<std::string> var_names;

  std::size_t num_vars() const noexcept { return relaxation.num_vars; }

  bool operator==(const MilpModel&) const = default;
};

enum class VarKind { Transfer, Indicator, Balance, Deviation };

inline const char* var_kind_prefix(VarKind kind) {
  switch (kind) {
    case VarKind::Transfer: return "x";
    case VarKind::Indicator: return "z";
    case VarKind::Balance: return "b";
    case VarKind::Deviation: return "delta";
  }
  return "?";
}

/// Flat layout of the decision variables. For each period the block is
/// [x (n), z (n), b (m), delta (0 or 1)], periods in ascending order.
class VariableMap {
 public:
  struct Key {
    VarKind kind;
    std::size_t period;  // 0-based
    std::size_t index;   // transaction or account; 0 for delta

    bool operator==(const Key&) const = default;
  };

  VariableMap() = default;
  VariableMap(std::size_t horizon, std::size_t num_transactions, std::size_t num_accounts,
              bool with_deviation)
      : horizon_(horizon),
        n_(num_transactions),
        m_(num_accounts),
        deviation_(with_deviation ? 1 : 0) {}

  std::size_t horizon() const noexcept { return horizon_; }
  std::size_t num_transactions() const noexcept { return n_; }
  std::size_t num_accounts() const noexcept { return m_; }
  bool has_deviation() const noexcept { return deviation_ != 0; }
  std::size_t block_size() const noexcept { return 2 * n_ + m_ + deviation_; }
  std::size_t size() const noexcept { return horizon_ * block_size(); }

  std::size_t x(std::size_t t, std::size_t i) const { return index({VarKind::Transfer, t, i}); }
  std::size_t z(std::size_t t, std::size_t i) const { return index({VarKind::Indicator, t, i}); }
  std::size_t b(std::size_t t, std::size_t j) const { return index({VarKind::Balance, t, j}); }
  std::size_t delta(std::size_t t) const { return index({VarKind::Deviation, t, 0}); }

  std::size_t index(const Key& key) const {
    if (key.period >= horizon_) throw std::out_of_range("VariableMap: period out of range");
    const std::size_t base = key.period * block_size();
    switch (key.kind) {
      case VarKind::Transfer:
        if (key.index >= n_) break;
        return base + key.index;
      case VarKind::Indicator:
        if (key.index >= n_) break;
        return base + n_ + key.index;
      case VarKind::Balance:
        if (key.index >= m_) break;
        return base + 2 * n_ + key.index;
      case VarKind::Deviation:
        if (!deviation_ || key.index != 0) break;
        return base + 2 * n_ + m_;
    }
    throw std::out_of_range("VariableMap: no such variable");
  }

  Key key(std::size_t position) const {
    if (position >= size()) throw std::out_of_range("VariableMap: position out of range");
    const std::size_t t = position / block_size();
    std::size_t offset = position % block_size();
    if (offset < n_) return {VarKind::Transfer, t, offset};
    offset -= n_;
    if (offset < n_) return {VarKind::Indicator, t, offset};
    offset -= n_;
    if (offset < m_) return {VarKind::Balance, t, offset};
    return {VarKind::Deviation, t, 0};
  }

  std::string name(std::size_t position) const {
    const Key k = key(position);
    std::string out = var_kind_prefix(k.kind);
    out += "(" + std::to_string(k.period + 1);
    if (k.kind != VarKind::Deviation) out += "," + std::to_string(k.index + 1);
    return out + ")";
  }

 private:
  std::size_t horizon_ = 0;
  std::size_t n_ = 0;
  std::size_t m_ = 0;
  std::size_t deviation_ = 0;
};

struct FormulatedModel {
  MilpModel model;
  VariableMap map;
};

/// Big-M for the link x <= M z: the total cash that ever enters the system,
/// i.e. the initial balances plus every positive forecast. Same for all i.
inline std::vector<double> compute_big_m(const ProblemInstance& instance) {
  double total = 0.0;
  for (double b0 : instance.initial_balance) total += b0;
  for (double f : instance.forecasts.values()) total += std::max(f, 0.0);
  return std::vector<double>(instance.system.num_transactions(), total);
}

namespace detail {

// Terms of c(x_t) = fixed . z_t + variable . x_t + holding . b_t, scaled.
inline void append_period_cost_terms(const ProblemInstance& instance, const VariableMap& map,
                                     std::size_t t, double scale, std::vector<Term>& terms) {
  const std::size_t n = map.num_transactions();
  const std::size_t m = map.num_accounts();
  for (std::size_t i = 0; i < n; ++i) {
    terms.push_back({map.x(t, i), scale * instance.costs.variable[i]});
  }
  for (std::size_t i = 0; i < n; ++i) {
    terms.push_back({map.z(t, i), scale * instance.costs.fixed[i]});
  }
  for (std::size_t j = 0; j < m; ++j) {
    terms.push_back({map.b(t, j), scale * instance.costs.holding[j]});
  }
}

inline FormulatedModel build_base_model(const ProblemInstance& instance, bool with_deviation) {
  require_valid(validate_instance(instance), "problem instance");
  const std::size_t n = instance.system.num_transactions();
  const std::size_t m = instance.system.num_accounts();
  const std::size_t horizon = instance.horizon;

  FormulatedModel out;
  out.map = VariableMap(horizon, n, m, with_deviation);
  const VariableMap& map = out.map;
  LpProblem& lp = out.model.relaxation;
  lp.num_vars = map.size();
  lp.objective.assign(lp.num_vars, 0.0);
  lp.lower.assign(lp.num_vars, 0.0);
  lp.upper.assign(lp.num_vars, kInfinity);
  out.model.integrality.assign(lp.num_vars, false);
  out.model.var_names.reserve(lp.num_vars);
  for (std::size_t k = 0; k < lp.num_vars; ++k) out.model.var_names.push_back(map.name(k));

  const std::vector<double> big_m = compute_big_m(instance);

  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      out.model.integrality[map.z(t, i)] = true;
      lp.upper[map.z(t, i)] = 1.0;
    }
    for (std::size_t j = 0; j < m; ++j) lp.lower[map.b(t, j)] = instance.min_balance[j];

    // b_t - b_{t-1} - A^T x_t = f_t, with b_0 moved to the rhs at t = 1.
    for (std::size_t j = 0; j < m; ++j) {
      LinearConstraint row;
      row.relation = Relation::Equal;
      row.terms.push_back({map.b(t, j), 1.0});
      if (t > 0) row.terms.push_back({map.b(t - 1, j), -1.0});
      for (std::size_t i = 0; i < n; ++i) {
        const int a = instance.system.incidence(i, j);
        if (a != 0) row.terms.push_back({map.x(t, i), -static_cast<double>(a)});
      }
      row.rhs = instance.forecasts(t, j) + (t == 0 ? instance.initial_balance[j] : 0.0);
      lp.constraints.push_back(std::move(row));
    }

    // x_{t,i} - M_i z_{t,i} <= 0
    for (std::size_t i = 0; i < n; ++i) {
      LinearConstraint row;
      row.relation = Relation::LessEqual;
      row.terms = {{map.x(t, i), 1.0}, {map.z(t, i), -big_m[i]}};
      row.rhs = 0.0;
      lp.constraints.push_back(std::move(row));
    }
  }
  return out;
}

}  // namespace detail

/// Cost-only program: minimize the sum of period costs subject to the
/// balance recursion, the balance floors and nonnegative transfers.
inline FormulatedModel build_cost_model(const ProblemInstance& instance) {
  FormulatedModel out = detail::build_base_model(instance, /*with_deviation=*/false);
  std::vector<Term> cost_terms;
  for (std::size_t t = 0; t < instance.horizon; ++t) {
    detail::append_period_cost_terms(instance, out.map, t, 1.0, cost_terms);
  }
  for (const Term& term : cost_terms) out.model.relaxation.objective[term.var] += term.coef;
  return out;
}

/// Cost-risk program. Adds one deviation variable per period with
/// c(x_t) - delta_t <= cost_ref, the budgets sum c <= cost_budget and
/// sum delta <= risk_budget, and the weighted objective
/// (w1 / cost_budget) sum c + (w2 / risk_budget) sum delta.
inline FormulatedModel build_cost_risk_model(const ProblemInstance& instance, const RiskParams& risk) {
  require_valid(validate_risk(risk), "risk parameters");
  FormulatedModel out = detail::build_base_model(instance, /*with_deviation=*/true);
  LpProblem& lp = out.model.relaxation;
  const VariableMap& map = out.map;

  LinearConstraint cost_budget;
  cost_budget.relation = Relation::LessEqual;
  cost_budget.rhs = risk.cost_budget;
  LinearConstraint risk_budget;
  risk_budget.relation = Relation::LessEqual;
  risk_budget.rhs = risk.risk_budget;

  const double cost_scale = risk.cost_weight / risk.cost_budget;
  const double risk_scale = risk.risk_weight / risk.risk_budget;

  for (std::size_t t = 0; t < instance.horizon; ++t) {
    LinearConstraint deviation;
    deviation.relation = Relation::LessEqual;
    detail::append_period_cost_terms(instance, map, t, 1.0, deviation.terms);
    cost_budget.terms.insert(cost_budget.terms.end(), deviation.terms.begin(), deviation.terms.end());
    for (const Term& term : deviation.terms) lp.objective[term.var] += cost_scale * term.coef;
    deviation.terms.push_back({map.delta(t), -1.0});
    deviation.rhs = risk.cost_ref;
    lp.constraints.push_back(std::move(deviation));

    risk_budget.terms.push_back({map.delta(t), 1.0});
    lp.objective[map.delta(t)] += risk_scale;
  }
  lp.constraints.push_back(std::move(cost_budget));
  lp.constraints.push_back(std::move(risk_budget));
  return out;
}

/// Values of a model assignment split back into domain matrices.
struct DecodedAssignment {
  Policy policy;
  BalancePath balances;
  Matrix<int> indicators;  // horizon x n
  std::vector<double> deviations;
};

/// Transfers at or below the indicator threshold (or negative noise) are
/// reported as exactly zero; indicators are rounded to 0/1.
inline DecodedAssignment decode(const VariableMap& map, std::span<const double> values) {
  if (values.size() != map.size()) throw std::invalid_argument("decode: assignment size mismatch");
  const std::size_t horizon = map.horizon();
  const std::size_t n = map.num_transactions();
  const std::size_t m = map.num_accounts();
  DecodedAssignment out{Policy{DenseMatrix(horizon, n)}, BalancePath{DenseMatrix(horizon, m)},
                        Matrix<int>(horizon, n), std::vector<double>(horizon, 0.0)};
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = values[map.x(t, i)];
      out.policy.actions(t, i) = x > kIndicatorThreshold ? x : 0.0;
      out.indicators(t, i) = values[map.z(t, i)] >= 0.5 ? 1 : 0;
    }
    for (std::size_t j = 0; j < m; ++j) out.balances.balances(t, j) = values[map.b(t, j)];
    if (map.has_deviation()) out.deviations[t] = std::max(0.0, values[map.delta(t)]);
  }
  return out;
}

}  // namespace cashmgmt
