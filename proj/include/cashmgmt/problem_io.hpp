#pragma once

#include <charconv>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cashmgmt/model.hpp"

namespace cashmgmt {

using json = nlohmann::json;

inline constexpr const char* kFormatVersion = "1";

/// Malformed or inconsistent input file. Carries every diagnostic found.
class ProblemFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ProblemFileError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

inline std::string label_from_json(const json& value, const std::string& where) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<long long>());
  throw ProblemFileError(where + ": label must be a string or an integer");
}

inline double number_from_json(const json& value, const std::string& where) {
  if (!value.is_number()) throw ProblemFileError(where + ": expected a number");
  return value.get<double>();
}

inline const json& require_key(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw ProblemFileError(std::string("missing key \"") + key + "\"");
  return *it;
}

inline std::vector<double> account_map(const json& doc, const char* key,
                                       const std::vector<std::string>& accounts,
                                       std::vector<std::string>& errors) {
  const json& map = require_key(doc, key);
  if (!map.is_object()) throw ProblemFileError(std::string(key) + ": expected an object keyed by account label");
  std::vector<double> out(accounts.size(), 0.0);
  for (std::size_t j = 0; j < accounts.size(); ++j) {
    auto it = map.find(accounts[j]);
    if (it == map.end()) {
      errors.push_back(std::string(key) + ": no value for account \"" + accounts[j] + "\"");
      continue;
    }
    out[j] = number_from_json(*it, std::string(key) + "." + accounts[j]);
  }
  for (const auto& [label, value] : map.items()) {
    if (std::find(accounts.begin(), accounts.end(), label) == accounts.end()) {
      errors.push_back(std::string(key) + ": unknown account label \"" + label + "\"");
    }
  }
  return out;
}

inline std::string format_csv_number(double value) { return format_number(value); }

inline double parse_csv_number(std::string_view cell, std::size_t line) {
  while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t')) cell.remove_prefix(1);
  while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t' || cell.back() == '\r')) {
    cell.remove_suffix(1);
  }
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || end != cell.data() + cell.size()) {
    throw ProblemFileError("line " + std::to_string(line) + ": cannot parse number \"" +
                           std::string(cell) + "\"");
  }
  return value;
}

inline std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    std::string_view cell = line.substr(start, comma == std::string_view::npos ? line.npos : comma - start);
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.remove_suffix(1);
    while (!cell.empty() && cell.front() == ' ') cell.remove_prefix(1);
    cells.emplace_back(cell);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace detail

/// Delimited matrix: a header row of column labels, then one row per period.
struct LabeledMatrix {
  std::vector<std::string> labels;
  DenseMatrix values;
};

inline std::string write_matrix_csv(const std::vector<std::string>& labels, const DenseMatrix& values) {
  if (labels.size() != values.cols()) throw std::invalid_argument("write_matrix_csv: label count mismatch");
  std::string out;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    if (c) out += ',';
    out += labels[c];
  }
  out += '\n';
  for (std::size_t r = 0; r < values.rows(); ++r) {
    for (std::size_t c = 0; c < values.cols(); ++c) {
      if (c) out += ',';
      out += detail::format_csv_number(values(r, c));
    }
    out += '\n';
  }
  return out;
}

inline LabeledMatrix read_matrix_csv(std::string_view text) {
  LabeledMatrix out;
  std::vector<std::vector<double>> rows;
  std::size_t line_number = 0;
  std::size_t pos = 0;
  bool have_header = false;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_number;
    if (line.empty() || line == "\r") continue;
    auto cells = detail::split_csv_line(line);
    if (!have_header) {
      out.labels = std::move(cells);
      have_header = true;
      continue;
    }
    if (cells.size() != out.labels.size()) {
      throw ProblemFileError("line " + std::to_string(line_number) + ": expected " +
                             std::to_string(out.labels.size()) + " values, found " +
                             std::to_string(cells.size()));
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(detail::parse_csv_number(cell, line_number));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ProblemFileError("delimited file has no header row");
  out.values = rows.empty() ? DenseMatrix(0, out.labels.size()) : DenseMatrix::from_rows(rows);
  return out;
}

/// Builds an instance from a problem document. `base_dir` resolves a
/// forecasts file given by relative path. Throws ProblemFileError listing
/// every problem found.
inline ProblemInstance parse_problem(const json& doc, const std::filesystem::path& base_dir = {}) {
  if (!doc.is_object()) throw ProblemFileError("problem document must be a JSON object");
  std::vector<std::string> errors;
  ProblemInstance instance;
  CashSystem& system = instance.system;

  const json& accounts = detail::require_key(doc, "accounts");
  if (!accounts.is_array()) throw ProblemFileError("accounts: expected a list of labels");
  for (std::size_t j = 0; j < accounts.size(); ++j) {
    system.account_labels.push_back(detail::label_from_json(accounts[j], "accounts[" + std::to_string(j) + "]"));
  }
  auto account_index = [&system](const std::string& label) -> std::optional<std::size_t> {
    for (std::size_t j = 0; j < system.account_labels.size(); ++j) {
      if (system.account_labels[j] == label) return j;
    }
    return std::nullopt;
  };

  const json& transactions = detail::require_key(doc, "transactions");
  if (!transactions.is_array()) throw ProblemFileError("transactions: expected a list");
  system.incidence = IncidenceMatrix(transactions.size(), system.account_labels.size(), 0);
  for (std::size_t i = 0; i < transactions.size(); ++i) {
    const json& tr = transactions[i];
    const std::string where = "transactions[" + std::to_string(i) + "]";
    if (!tr.is_object()) throw ProblemFileError(where + ": expected an object");
    const std::string label = detail::label_from_json(detail::require_key(tr, "label"), where + ".label");
    const std::string from = detail::label_from_json(detail::require_key(tr, "from"), where + ".from");
    const std::string to = detail::label_from_json(detail::require_key(tr, "to"), where + ".to");
    system.transaction_labels.push_back(label);
    instance.costs.fixed.push_back(detail::number_from_json(detail::require_key(tr, "fixed_cost"), where + ".fixed_cost"));
    instance.costs.variable.push_back(
        detail::number_from_json(detail::require_key(tr, "variable_cost"), where + ".variable_cost"));
    const auto source = account_index(from);
    const auto target = account_index(to);
    if (!source) errors.push_back("transaction " + label + ": unknown account label \"" + from + "\"");
    if (!target) errors.push_back("transaction " + label + ": unknown account label \"" + to + "\"");
    if (source && target) {
      if (*source == *target) {
        errors.push_back("transaction " + label + ": from and to are both \"" + from + "\"");
      } else {
        system.incidence(i, *source) = -1;
        system.incidence(i, *target) = 1;
      }
    }
  }

  instance.costs.holding = detail::account_map(doc, "holding_costs", system.account_labels, errors);
  instance.min_balance = detail::account_map(doc, "min_balance", system.account_labels, errors);
  instance.initial_balance = detail::account_map(doc, "initial_balance", system.account_labels, errors);

  const json& horizon = detail::require_key(doc, "horizon");
  if (!horizon.is_number_integer() || horizon.get<long long>() < 1) {
    throw ProblemFileError("horizon: expected a positive integer");
  }
  instance.horizon = static_cast<std::size_t>(horizon.get<long long>());

  const json& forecasts = detail::require_key(doc, "forecasts");
  const std::size_t m = system.account_labels.size();
  if (forecasts.is_string()) {
    std::filesystem::path path = forecasts.get<std::string>();
    if (path.is_relative()) path = base_dir / path;
    const LabeledMatrix table = read_matrix_csv(detail::read_text_file(path));
    instance.forecasts = DenseMatrix(table.values.rows(), m);
    for (std::size_t j = 0; j < m; ++j) {
      auto it = std::find(table.labels.begin(), table.labels.end(), system.account_labels[j]);
      if (it == table.labels.end()) {
        errors.push_back("forecasts file " + path.string() + ": no column for account \"" +
                         system.account_labels[j] + "\"");
        continue;
      }
      const auto column = static_cast<std::size_t>(it - table.labels.begin());
      for (std::size_t t = 0; t < table.values.rows(); ++t) instance.forecasts(t, j) = table.values(t, column);
    }
    if (table.labels.size() != m) {
      errors.push_back("forecasts file " + path.string() + " has " + std::to_string(table.labels.size()) +
                       " columns for " + std::to_string(m) + " accounts");
    }
  } else if (forecasts.is_array()) {
    std::vector<std::vector<double>> rows;
    for (std::size_t t = 0; t < forecasts.size(); ++t) {
      const json& row = forecasts[t];
      if (!row.is_array() || row.size() != m) {
        throw ProblemFileError("forecasts[" + std::to_string(t) + "]: expected a row of " +
                               std::to_string(m) + " numbers");
      }
      std::vector<double> values;
      for (std::size_t j = 0; j < m; ++j) {
        values.push_back(detail::number_from_json(row[j], "forecasts[" + std::to_string(t) + "]"));
      }
      rows.push_back(std::move(values));
    }
    instance.forecasts = rows.empty() ? DenseMatrix(0, m) : DenseMatrix::from_rows(rows);
  } else {
    throw ProblemFileError("forecasts: expected a matrix or a path to a delimited file");
  }
  if (instance.forecasts.rows() != instance.horizon) {
    errors.push_back("forecasts have " + std::to_string(instance.forecasts.rows()) +
                     " rows but horizon is " + std::to_string(instance.horizon));
  }

  if (errors.empty()) {
    const ValidationReport report = validate_instance(instance);
    errors.insert(errors.end(), report.violations.begin(), report.violations.end());
  }
  if (!errors.empty()) {
    std::string message = "invalid problem:";
    for (const auto& e : errors) message += "\n  " + e;
    throw ProblemFileError(message);
  }
  return instance;
}

inline ProblemInstance load_problem(const std::filesystem::path& path) {
  const std::string text = detail::read_text_file(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ProblemFileError(path.string() + ": " + e.what());
  }
  return parse_problem(doc, path.parent_path());
}

/// Problem document with inline forecasts. Endpoints come from the
/// incidence matrix, so the system must be valid.
inline json write_problem(const ProblemInstance& instance) {
  require_valid(validate_system(instance.system), "cash system");
  const CashSystem& system = instance.system;
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["accounts"] = system.account_labels;
  json transactions = json::array();
  for (std::size_t i = 0; i < system.num_transactions(); ++i) {
    transactions.push_back({{"label", system.transaction_labels[i]},
                            {"from", system.account_labels[*system.source(i)]},
                            {"to", system.account_labels[*system.destination(i)]},
                            {"fixed_cost", instance.costs.fixed[i]},
                            {"variable_cost", instance.costs.variable[i]}});
  }
  doc["transactions"] = std::move(transactions);
  auto by_account = [&system](const std::vector<double>& values) {
    json out = json::object();
    for (std::size_t j = 0; j < system.num_accounts(); ++j) out[system.account_labels[j]] = values[j];
    return out;
  };
  doc["holding_costs"] = by_account(instance.costs.holding);
  doc["min_balance"] = by_account(instance.min_balance);
  doc["initial_balance"] = by_account(instance.initial_balance);
  doc["horizon"] = instance.horizon;
  json forecasts = json::array();
  for (std::size_t t = 0; t < instance.forecasts.rows(); ++t) {
    forecasts.push_back(std::vector<double>(instance.forecasts.row(t).begin(), instance.forecasts.row(t).end()));
  }
  doc["forecasts"] = std::move(forecasts);
  return doc;
}

namespace detail {

inline json matrix_rows(const DenseMatrix& values) {
  json rows = json::array();
  for (std::size_t r = 0; r < values.rows(); ++r) {
    rows.push_back(std::vector<double>(values.row(r).begin(), values.row(r).end()));
  }
  return rows;
}

}  // namespace detail

enum class SolveMode { Cost, Risk };

/// Solution document. Timing is the only nondeterministic field and can be
/// left out for comparisons.
inline json solution_to_json(const ProblemInstance& instance, const Solution& solution, SolveMode mode,
                             const std::optional<RiskParams>& risk = std::nullopt,
                             bool include_timing = true) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["mode"] = mode == SolveMode::Cost ? "cost" : "risk";
  doc["status"] = to_string(solution.status);
  if (solution.has_policy()) {
    doc["objective"] = solution.objective;
    doc["total_cost"] = std::accumulate(solution.period_costs.begin(), solution.period_costs.end(), 0.0);
  } else {
    doc["objective"] = nullptr;
    doc["total_cost"] = nullptr;
  }
  doc["period_costs"] = solution.period_costs;
  doc["deviations"] = solution.deviations;
  if (risk) {
    doc["risk_params"] = {{"cost_ref", risk->cost_ref},       {"cost_budget", risk->cost_budget},
                          {"risk_budget", risk->risk_budget}, {"cost_weight", risk->cost_weight},
                          {"risk_weight", risk->risk_weight}};
    if (solution.has_policy()) doc["ccar"] = empirical_ccar(solution.period_costs, risk->cost_ref);
  }
  doc["policy"] = {{"transactions", instance.system.transaction_labels},
                   {"matrix", detail::matrix_rows(solution.policy.actions)}};
  doc["balances"] = {{"accounts", instance.system.account_labels},
                     {"matrix", detail::matrix_rows(solution.balances.balances)}};
  json stats = {{"nodes", solution.stats.nodes}, {"lp_iterations", solution.stats.lp_iterations}};
  if (include_timing) stats["wall_time_ms"] = solution.stats.wall_time_ms;
  doc["stats"] = std::move(stats);
  return doc;
}

/// Per-account balance series indexed by period 0..horizon, period 0 being
/// the initial balance. Raw data for plotting; nothing is rendered.
inline json plot_data_json(const ProblemInstance& instance, const Solution& solution) {
  json doc;
  doc["format_version"] = kFormatVersion;
  const std::size_t periods = solution.balances.balances.rows();
  std::vector<std::size_t> index(periods + 1);
  std::iota(index.begin(), index.end(), std::size_t{0});
  doc["periods"] = index;
  json series = json::object();
  json floors = json::object();
  for (std::size_t j = 0; j < instance.system.num_accounts(); ++j) {
    std::vector<double> values{instance.initial_balance[j]};
    for (std::size_t t = 0; t < periods; ++t) values.push_back(solution.balances.balances(t, j));
    series[instance.system.account_labels[j]] = values;
    floors[instance.system.account_labels[j]] = instance.min_balance[j];
  }
  doc["accounts"] = instance.system.account_labels;
  doc["series"] = std::move(series);
  doc["min_balance"] = std::move(floors);
  return doc;
}

}  // namespace cashmgmt
