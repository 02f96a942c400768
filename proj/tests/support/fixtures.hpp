#pragma once

#include <filesystem>
#include <string>

#include "cashmgmt/model.hpp"

#ifndef CASHMGMT_DATA_DIR
#define CASHMGMT_DATA_DIR "data"
#endif

namespace cashmgmt::test {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(CASHMGMT_DATA_DIR) / name;
}

// Three accounts: two current accounts and an investment account. Built
// straight from the coefficient listing, with A given account by account
// and transposed, independently of the file loader.
inline ProblemInstance fixture_instance() {
  ProblemInstance instance;
  instance.system.account_labels = {"1", "2", "3"};
  instance.system.transaction_labels = {"1", "2", "3", "4", "5", "6"};
  const IncidenceMatrix by_account{{1, -1, 0, 0, 1, -1},
                                   {-1, 1, 1, -1, 0, 0},
                                   {0, 0, -1, 1, -1, 1}};
  instance.system.incidence = by_account.transposed();
  instance.costs.fixed = {50, 50, 100, 50, 100, 50};
  instance.costs.variable = {0, 0, 100, 10, 100, 10};
  instance.costs.holding = {100, 100, 0};
  instance.min_balance = {2, 2, 0};
  instance.initial_balance = {5, 8, 12};
  instance.forecasts = DenseMatrix{{1, -3, 0}, {1, -9, 0}, {6, 6, 0}, {-1, -4, 0}, {-1, 6, 0}};
  instance.horizon = 5;
  return instance;
}

inline ProblemInstance truncate_horizon(const ProblemInstance& instance, std::size_t horizon) {
  ProblemInstance out = instance;
  out.horizon = horizon;
  out.forecasts = DenseMatrix(horizon, instance.forecasts.cols());
  for (std::size_t t = 0; t < horizon; ++t) {
    for (std::size_t j = 0; j < instance.forecasts.cols(); ++j) out.forecasts(t, j) = instance.forecasts(t, j);
  }
  return out;
}

inline ProblemInstance scale_costs(ProblemInstance instance, double k) {
  for (double& c : instance.costs.fixed) c *= k;
  for (double& c : instance.costs.variable) c *= k;
  for (double& c : instance.costs.holding) c *= k;
  return instance;
}

}  // namespace cashmgmt::test
