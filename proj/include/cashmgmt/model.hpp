#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "cashmgmt/matrix.hpp"

namespace cashmgmt {

// A transfer amount above this counts as executed and pays its fixed charge.
inline constexpr double kIndicatorThreshold = 1e-9;
// Absolute slack allowed when checking balances against their floors.
inline constexpr double kFeasibilityTolerance = 1e-9;
inline constexpr double kWeightSumTolerance = 1e-12;

/// Accounts, the transfers allowed between them, and the n x m incidence
/// matrix. Entry (i, j) is +1 when transaction i credits account j and -1
/// when it debits it.
struct CashSystem {
  std::vector<std::string> account_labels;
  std::vector<std::string> transaction_labels;
  IncidenceMatrix incidence;

  std::size_t num_accounts() const noexcept { return account_labels.size(); }
  std::size_t num_transactions() const noexcept { return transaction_labels.size(); }

  // Account debited by transaction i, if the row has one.
  std::optional<std::size_t> source(std::size_t i) const {
    for (std::size_t j = 0; j < incidence.cols(); ++j) {
      if (incidence(i, j) == -1) return j;
    }
    return std::nullopt;
  }

  std::optional<std::size_t> destination(std::size_t i) const {
    for (std::size_t j = 0; j < incidence.cols(); ++j) {
      if (incidence(i, j) == 1) return j;
    }
    return std::nullopt;
  }
};

/// Fixed and variable transaction costs (length n) and per-account holding
/// costs (length m). Amounts are money units; variable and holding costs are
/// cost units per money unit (holding is also per period).
struct CostStructure {
  std::vector<double> fixed;
  std::vector<double> variable;
  std::vector<double> holding;
};

struct ProblemInstance {
  CashSystem system;
  CostStructure costs;
  std::vector<double> min_balance;
  std::vector<double> initial_balance;
  DenseMatrix forecasts;  // horizon x m, row t-1 holds the net flows of period t
  std::size_t horizon = 0;
};

/// Parameters of the cost-risk program: the reference cost per period, the
/// two budgets that normalise the objective, and the preference weights.
struct RiskParams {
  double cost_ref = 0.0;
  double cost_budget = 1.0;
  double risk_budget = 1.0;
  double cost_weight = 1.0;
  double risk_weight = 0.0;
};

struct Policy {
  DenseMatrix actions;  // horizon x n

  bool operator==(const Policy&) const = default;
};

struct BalancePath {
  DenseMatrix balances;  // horizon x m, row t-1 holds the balances after period t

  bool operator==(const BalancePath&) const = default;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit };

inline const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "Optimal";
    case SolveStatus::Infeasible: return "Infeasible";
    case SolveStatus::IterationLimit: return "IterationLimit";
  }
  return "Unknown";
}

struct SolveStats {
  std::size_t nodes = 0;
  std::size_t lp_iterations = 0;
  double wall_time_ms = 0.0;
};

struct Solution {
  SolveStatus status = SolveStatus::Infeasible;
  Policy policy;
  BalancePath balances;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> period_costs;
  std::vector<double> deviations;
  SolveStats stats;

  bool has_policy() const noexcept { return !policy.actions.empty(); }
};

struct ValidationReport {
  std::vector<std::string> violations;
  // Conditions worth reporting that do not make the input unusable.
  std::vector<std::string> warnings;

  bool ok() const noexcept { return violations.empty(); }
};

struct Shortfall {
  std::size_t period;   // 1-based period t of b_t
  std::size_t account;  // 0-based account column
  double shortfall;

  bool operator==(const Shortfall&) const = default;
};

struct FeasibilityReport {
  std::vector<Shortfall> violations;

  bool ok() const noexcept { return violations.empty(); }
};

struct PolicyCost {
  double total = 0.0;
  std::vector<double> per_period;
};

namespace detail {

inline std::string format_number(double value) {
  char buffer[64];
  auto [end, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc{}) return "?";
  return std::string(buffer, end);
}

template <typename Range>
bool has_duplicates(const Range& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& label : labels) {
    if (!seen.insert(label).second) return true;
  }
  return false;
}

inline void check_cost_vector(const std::vector<double>& values, std::size_t expected,
                              const char* name, ValidationReport& report) {
  if (values.size() != expected) {
    report.violations.push_back(std::string(name) + " has length " +
                                std::to_string(values.size()) + ", expected " +
                                std::to_string(expected));
    return;
  }
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values[k]) || values[k] < 0.0) {
      report.violations.push_back(std::string(name) + "[" + std::to_string(k) +
                                  "] must be finite and nonnegative, got " +
                                  format_number(values[k]));
    }
  }
}

}  // namespace detail

inline ValidationReport validate_system(const CashSystem& system) {
  ValidationReport report;
  const std::size_t m = system.num_accounts();
  const std::size_t n = system.num_transactions();
  if (m == 0) report.violations.push_back("system has no accounts");
  if (n == 0) report.violations.push_back("system has no transactions");
  if (detail::has_duplicates(system.account_labels)) {
    report.violations.push_back("account labels are not unique");
  }
  if (detail::has_duplicates(system.transaction_labels)) {
    report.violations.push_back("transaction labels are not unique");
  }
  if (system.incidence.rows() != n || system.incidence.cols() != m) {
    report.violations.push_back("incidence matrix is " + std::to_string(system.incidence.rows()) +
                                "x" + std::to_string(system.incidence.cols()) + ", expected " +
                                std::to_string(n) + "x" + std::to_string(m));
    return report;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::string row_name = "transaction " + std::to_string(i + 1) + " (" +
                                 system.transaction_labels[i] + ")";
    int credits = 0;
    int debits = 0;
    bool in_domain = true;
    for (std::size_t j = 0; j < m; ++j) {
      const int entry = system.incidence(i, j);
      if (entry == 1) {
        ++credits;
      } else if (entry == -1) {
        ++debits;
      } else if (entry != 0) {
        in_domain = false;
        report.violations.push_back(row_name + ": entry outside {-1,0,1} at account " +
                                    std::to_string(j + 1) + " (value " + std::to_string(entry) +
                                    ")");
      }
    }
    if (!in_domain) continue;
    if (credits == 0 && debits == 0) {
      report.violations.push_back(row_name + ": transaction with no endpoints");
    } else if (credits != 1 || debits != 1) {
      report.violations.push_back(row_name + ": expected exactly one +1 and one -1, found " +
                                  std::to_string(credits) + " and " + std::to_string(debits));
    }
  }
  return report;
}

inline ValidationReport validate_costs(const CostStructure& costs, const CashSystem& system) {
  ValidationReport report;
  detail::check_cost_vector(costs.fixed, system.num_transactions(), "fixed cost", report);
  detail::check_cost_vector(costs.variable, system.num_transactions(), "variable cost", report);
  detail::check_cost_vector(costs.holding, system.num_accounts(), "holding cost", report);
  return report;
}

/// Full check of an instance. Initial balances below the floor are only a
/// warning: b_0 is never constrained, and whether the floor can be reached is
/// for the solver to decide.
inline ValidationReport validate_instance(const ProblemInstance& instance) {
  ValidationReport report = validate_system(instance.system);
  auto merge = [&report](const ValidationReport& other) {
    report.violations.insert(report.violations.end(), other.violations.begin(),
                             other.violations.end());
  };
  merge(validate_costs(instance.costs, instance.system));

  const std::size_t m = instance.system.num_accounts();
  if (instance.horizon == 0) report.violations.push_back("horizon must be at least 1");
  if (instance.forecasts.rows() != instance.horizon) {
    report.violations.push_back("forecast matrix has " + std::to_string(instance.forecasts.rows()) +
                                " rows but horizon is " + std::to_string(instance.horizon));
  }
  if (instance.forecasts.cols() != m) {
    report.violations.push_back("forecast matrix has " + std::to_string(instance.forecasts.cols()) +
                                " columns but the system has " + std::to_string(m) + " accounts");
  }
  for (double f : instance.forecasts.values()) {
    if (!std::isfinite(f)) {
      report.violations.push_back("forecast matrix contains a non-finite value");
      break;
    }
  }
  if (instance.min_balance.size() != m) {
    report.violations.push_back("min_balance has length " +
                                std::to_string(instance.min_balance.size()) + ", expected " +
                                std::to_string(m));
  }
  if (instance.initial_balance.size() != m) {
    report.violations.push_back("initial_balance has length " +
                                std::to_string(instance.initial_balance.size()) + ", expected " +
                                std::to_string(m));
  }
  if (!report.ok()) return report;

  for (std::size_t j = 0; j < m; ++j) {
    const std::string& label = instance.system.account_labels[j];
    const double floor = instance.min_balance[j];
    const double start = instance.initial_balance[j];
    if (!std::isfinite(floor) || floor < 0.0) {
      report.violations.push_back("min_balance of account " + label +
                                  " must be finite and nonnegative, got " +
                                  detail::format_number(floor));
    }
    if (!std::isfinite(start) || start < 0.0) {
      report.violations.push_back("initial_balance of account " + label +
                                  " must be finite and nonnegative, got " +
                                  detail::format_number(start));
    } else if (std::isfinite(floor) && start < floor) {
      report.warnings.push_back("initial balance of account " + label + " (" +
                                detail::format_number(start) + ") is below its minimum (" +
                                detail::format_number(floor) + ")");
    }
  }
  return report;
}

inline ValidationReport validate_risk(const RiskParams& risk) {
  ValidationReport report;
  if (!std::isfinite(risk.cost_ref)) report.violations.push_back("cost reference must be finite");
  if (!(risk.cost_budget > 0.0) || !std::isfinite(risk.cost_budget)) {
    report.violations.push_back("cost budget must be positive");
  }
  if (!(risk.risk_budget > 0.0) || !std::isfinite(risk.risk_budget)) {
    report.violations.push_back("risk budget must be positive");
  }
  const bool weights_in_range = risk.cost_weight >= 0.0 && risk.cost_weight <= 1.0 &&
                                risk.risk_weight >= 0.0 && risk.risk_weight <= 1.0;
  if (!weights_in_range) report.violations.push_back("weights must lie in [0, 1]");
  if (!(std::abs(risk.cost_weight + risk.risk_weight - 1.0) <= kWeightSumTolerance)) {
    report.violations.push_back("weights must sum to 1");
  }
  return report;
}

inline void require_valid(const ValidationReport& report, const char* what) {
  if (report.ok()) return;
  std::string message = std::string("invalid ") + what + ":";
  for (const auto& v : report.violations) message += "\n  " + v;
  throw std::invalid_argument(message);
}

/// Balance recursion b_t = b_{t-1} + f_t + A^T x_t, for t ascending.
inline BalancePath propagate_balances(std::span<const double> initial, const DenseMatrix& forecasts,
                                      const Policy& policy, const CashSystem& system) {
  const std::size_t m = system.num_accounts();
  const std::size_t n = system.num_transactions();
  const std::size_t horizon = forecasts.rows();
  if (initial.size() != m || forecasts.cols() != m || policy.actions.rows() != horizon ||
      policy.actions.cols() != n || system.incidence.rows() != n || system.incidence.cols() != m) {
    throw std::invalid_argument("propagate_balances: dimension mismatch");
  }
  BalancePath path{DenseMatrix(horizon, m)};
  std::vector<double> current(initial.begin(), initial.end());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t j = 0; j < m; ++j) {
      double net = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const int a = system.incidence(i, j);
        if (a != 0) net += a * policy.actions(t, i);
      }
      current[j] = current[j] + forecasts(t, j) + net;
      path.balances(t, j) = current[j];
    }
  }
  return path;
}

inline FeasibilityReport check_feasible(const BalancePath& path, std::span<const double> min_balance) {
  if (path.balances.cols() != min_balance.size()) {
    throw std::invalid_argument("check_feasible: dimension mismatch");
  }
  FeasibilityReport report;
  for (std::size_t t = 0; t < path.balances.rows(); ++t) {
    for (std::size_t j = 0; j < min_balance.size(); ++j) {
      const double b = path.balances(t, j);
      if (b < min_balance[j] - kFeasibilityTolerance) {
        report.violations.push_back({t + 1, j, min_balance[j] - b});
      }
    }
  }
  return report;
}

/// Transaction plus holding cost of one period:
/// fixed . z + variable . x + holding . b, with z_i = [x_i > kIndicatorThreshold].
inline double period_cost(std::span<const double> transfers, std::span<const double> balances,
                          const CostStructure& costs) {
  if (transfers.size() != costs.fixed.size() || transfers.size() != costs.variable.size() ||
      balances.size() != costs.holding.size()) {
    throw std::invalid_argument("period_cost: dimension mismatch");
  }
  double transaction = 0.0;
  for (std::size_t i = 0; i < transfers.size(); ++i) {
    const double x = transfers[i];
    if (x < 0.0) {
      throw std::invalid_argument("period_cost: negative transfer " + detail::format_number(x) +
                                  " for transaction " + std::to_string(i + 1));
    }
    if (x > kIndicatorThreshold) transaction += costs.fixed[i];
    transaction += costs.variable[i] * x;
  }
  double holding = 0.0;
  for (std::size_t j = 0; j < balances.size(); ++j) holding += costs.holding[j] * balances[j];
  return transaction + holding;
}

inline PolicyCost policy_cost_total(const Policy& policy, const BalancePath& path,
                                    const CostStructure& costs) {
  if (policy.actions.rows() != path.balances.rows()) {
    throw std::invalid_argument("policy_cost_total: policy and balances disagree on horizon");
  }
  PolicyCost result;
  result.per_period.reserve(policy.actions.rows());
  for (std::size_t t = 0; t < policy.actions.rows(); ++t) {
    const double c = period_cost(policy.actions.row(t), path.balances.row(t), costs);
    result.per_period.push_back(c);
    result.total += c;
  }
  return result;
}

/// Mean of the per-period costs strictly above the reference; 0 when none is.
inline double empirical_ccar(std::span<const double> period_costs, double cost_ref) {
  if (period_costs.empty()) throw std::invalid_argument("empirical_ccar: empty cost vector");
  double sum = 0.0;
  std::size_t count = 0;
  for (double c : period_costs) {
    if (c > cost_ref) {
      sum += c;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

inline std::string describe(const ProblemInstance& instance) {
  using detail::format_number;
  const CashSystem& system = instance.system;
  const std::size_t m = system.num_accounts();
  const std::size_t n = system.num_transactions();
  const ValidationReport report = validate_instance(instance);

  auto value_or_dash = [](const std::vector<double>& values, std::size_t k) {
    return k < values.size() ? format_number(values[k]) : std::string("-");
  };
  auto label_of = [&system](std::optional<std::size_t> account) {
    if (!account || *account >= system.account_labels.size()) return std::string("?");
    return system.account_labels[*account];
  };

  std::ostringstream out;
  out << "Cash management system: " << m << " accounts, " << n << " transactions\n";
  out << "Planning horizon: " << instance.horizon << " periods\n\n";
  out << "Accounts (holding cost / minimum balance / initial balance):\n";
  for (std::size_t j = 0; j < m; ++j) {
    out << "  " << system.account_labels[j] << ": holding " << value_or_dash(instance.costs.holding, j)
        << ", min " << value_or_dash(instance.min_balance, j) << ", initial "
        << value_or_dash(instance.initial_balance, j) << "\n";
  }
  out << "\nTransactions (source -> destination, fixed cost, variable cost):\n";
  for (std::size_t i = 0; i < n; ++i) {
    const bool has_row = i < system.incidence.rows();
    out << "  " << system.transaction_labels[i] << ": "
        << (has_row ? label_of(system.source(i)) : "?") << " -> "
        << (has_row ? label_of(system.destination(i)) : "?") << ", fixed "
        << value_or_dash(instance.costs.fixed, i) << ", variable "
        << value_or_dash(instance.costs.variable, i) << "\n";
  }
  if (!instance.forecasts.empty()) {
    out << "\nForecasts (rows = periods):\n";
    for (std::size_t t = 0; t < instance.forecasts.rows(); ++t) {
      out << "  t=" << t + 1 << ":";
      for (double f : instance.forecasts.row(t)) out << " " << format_number(f);
      out << "\n";
    }
  }
  if (!report.ok()) {
    out << "\nValidation failed:\n";
    for (const auto& v : report.violations) out << "  - " << v << "\n";
  }
  if (!report.warnings.empty()) {
    out << "\nWarnings:\n";
    for (const auto& w : report.warnings) out << "  - " << w << "\n";
  }
  return out.str();
}

}  // namespace cashmgmt
