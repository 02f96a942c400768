#pragma once

#include <filesystem>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cashmgmt/engine.hpp"
#include "cashmgmt/model.hpp"
#include "cashmgmt/problem_io.hpp"

namespace cashmgmt::cli {

enum ExitCode : int {
  kExitOptimal = 0,
  kExitFailure = 1,
  kExitInfeasible = 2,
  kExitInvalidInput = 3,
  kExitSolverLimit = 4,
};

inline int exit_code_for(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return kExitOptimal;
    case SolveStatus::Infeasible: return kExitInfeasible;
    case SolveStatus::IterationLimit: return kExitSolverLimit;
  }
  return kExitFailure;
}

namespace detail {

struct OutputPaths {
  std::string solution;
  std::string policy_csv;
  std::string balance_csv;
  std::string plot_data;
};

inline void add_output_options(CLI::App& cmd, OutputPaths& paths, std::size_t& max_nodes) {
  cmd.add_option("-o,--output", paths.solution, "Write the solution document here (default: stdout)");
  cmd.add_option("--policy-csv", paths.policy_csv, "Write the policy matrix (periods x transactions)");
  cmd.add_option("--balance-csv", paths.balance_csv, "Write the balance matrix (periods x accounts)");
  cmd.add_option("--plot-data", paths.plot_data, "Write per-account balance series for plotting");
  cmd.add_option("--max-nodes", max_nodes, "Branch-and-bound node limit")->capture_default_str();
}

inline void write_outputs(const ProblemInstance& instance, const Solution& solution, SolveMode mode,
                          const std::optional<RiskParams>& risk, const OutputPaths& paths,
                          std::ostream& out, std::ostream& err) {
  const std::string document = solution_to_json(instance, solution, mode, risk).dump(2) + "\n";
  if (paths.solution.empty()) {
    out << document;
  } else {
    cashmgmt::detail::write_text_file(paths.solution, document);
  }
  const bool wants_matrices =
      !paths.policy_csv.empty() || !paths.balance_csv.empty() || !paths.plot_data.empty();
  if (!solution.has_policy()) {
    if (wants_matrices) err << "no policy to export\n";
    return;
  }
  if (!paths.policy_csv.empty()) {
    cashmgmt::detail::write_text_file(
        paths.policy_csv, write_matrix_csv(instance.system.transaction_labels, solution.policy.actions));
  }
  if (!paths.balance_csv.empty()) {
    cashmgmt::detail::write_text_file(
        paths.balance_csv, write_matrix_csv(instance.system.account_labels, solution.balances.balances));
  }
  if (!paths.plot_data.empty()) {
    cashmgmt::detail::write_text_file(paths.plot_data, plot_data_json(instance, solution).dump(2) + "\n");
  }
}

inline void report_status(const Solution& solution, std::ostream& err) {
  switch (solution.status) {
    case SolveStatus::Optimal: break;
    case SolveStatus::Infeasible: err << "unable to find a feasible policy\n"; break;
    case SolveStatus::IterationLimit:
      err << "solver limit reached after " << solution.stats.nodes << " nodes"
          << (solution.has_policy() ? "; reporting the best policy found\n" : "\n");
      break;
  }
}

}  // namespace detail

/// Runs the command line front end. Never throws; returns the exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
  CLI::App app{"Optimal cash management policies for systems of bank accounts"};
  app.require_subcommand(1);

  std::string problem_path;
  detail::OutputPaths outputs;
  BnbOptions options;
  RiskParams risk;

  CLI::App* describe_cmd = app.add_subcommand("describe", "Print a summary of a problem file");
  describe_cmd->add_option("-p,--problem", problem_path, "Problem file")->required();

  CLI::App* cost_cmd = app.add_subcommand("solve-cost", "Minimize transaction plus holding cost");
  cost_cmd->add_option("-p,--problem", problem_path, "Problem file")->required();
  detail::add_output_options(*cost_cmd, outputs, options.max_nodes);

  CLI::App* risk_cmd = app.add_subcommand("solve-risk", "Minimize weighted cost and cost-at-risk");
  risk_cmd->add_option("-p,--problem", problem_path, "Problem file")->required();
  risk_cmd->add_option("--c0", risk.cost_ref, "Reference cost per period")->required();
  risk_cmd->add_option("--cmax", risk.cost_budget, "Cost budget")->required();
  risk_cmd->add_option("--rmax", risk.risk_budget, "Risk budget")->required();
  risk_cmd->add_option("--w1", risk.cost_weight, "Cost weight")->required();
  risk_cmd->add_option("--w2", risk.risk_weight, "Risk weight")->required();
  detail::add_output_options(*risk_cmd, outputs, options.max_nodes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInvalidInput;
  }

  try {
    const ProblemInstance instance = load_problem(problem_path);
    if (describe_cmd->parsed()) {
      out << describe(instance);
      return kExitOptimal;
    }
    if (options.max_nodes < 1) {
      err << "--max-nodes must be at least 1\n";
      return kExitInvalidInput;
    }
    if (cost_cmd->parsed()) {
      const Solution solution = solve_cost(instance, options);
      detail::report_status(solution, err);
      detail::write_outputs(instance, solution, SolveMode::Cost, std::nullopt, outputs, out, err);
      return exit_code_for(solution.status);
    }
    const ValidationReport risk_report = validate_risk(risk);
    if (!risk_report.ok()) {
      for (const auto& v : risk_report.violations) err << "invalid risk parameters: " << v << "\n";
      return kExitInvalidInput;
    }
    const Solution solution = solve_risk(instance, risk, options);
    detail::report_status(solution, err);
    detail::write_outputs(instance, solution, SolveMode::Risk, risk, outputs, out, err);
    return exit_code_for(solution.status);
  } catch (const ProblemFileError& e) {
    err << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << e.what() << "\n";
    return kExitInvalidInput;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace cashmgmt::cli
