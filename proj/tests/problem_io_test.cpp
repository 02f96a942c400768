#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>

#include "cashmgmt/engine.hpp"
#include "cashmgmt/problem_io.hpp"
#include "support/fixtures.hpp"
#include "support/random_instances.hpp"

using namespace cashmgmt;
namespace fs = std::filesystem;

namespace {

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = fs::temp_directory_path() /
            ("cashmgmt_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             std::to_string(counter++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

json fixture_document() { return json::parse(detail::read_text_file(test::data_path("example_s4.json"))); }

std::string parse_error(const json& doc) {
  try {
    parse_problem(doc);
  } catch (const ProblemFileError& e) {
    return e.what();
  }
  return {};
}

void expect_same_instance(const ProblemInstance& a, const ProblemInstance& b) {
  EXPECT_EQ(a.system.account_labels, b.system.account_labels);
  EXPECT_EQ(a.system.transaction_labels, b.system.transaction_labels);
  EXPECT_EQ(a.system.incidence, b.system.incidence);
  EXPECT_EQ(a.costs.fixed, b.costs.fixed);
  EXPECT_EQ(a.costs.variable, b.costs.variable);
  EXPECT_EQ(a.costs.holding, b.costs.holding);
  EXPECT_EQ(a.min_balance, b.min_balance);
  EXPECT_EQ(a.initial_balance, b.initial_balance);
  EXPECT_EQ(a.forecasts, b.forecasts);
  EXPECT_EQ(a.horizon, b.horizon);
}

}  // namespace

TEST(LoadProblem, FixtureFixtureMatchesListing) {
  expect_same_instance(load_problem(test::data_path("example_s4.json")), test::fixture_instance());
}

TEST(LoadProblem, ProseVariantDiffersInLastTwoPeriods) {
  const ProblemInstance prose = load_problem(test::data_path("example_s4_prose.json"));
  const ProblemInstance listing = test::fixture_instance();
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t j = 0; j < 3; ++j) EXPECT_EQ(prose.forecasts(t, j), listing.forecasts(t, j));
  }
  EXPECT_EQ(prose.forecasts(3, 1), 4.0);
  EXPECT_EQ(prose.forecasts(4, 0), -3.0);
}

TEST(LoadProblem, ForecastRowCountMismatch) {
  json doc = fixture_document();
  doc["horizon"] = 4;
  EXPECT_NE(parse_error(doc).find("forecasts have 5 rows but horizon is 4"), std::string::npos);
}

TEST(LoadProblem, UnknownAccountLabel) {
  json doc = fixture_document();
  doc["transactions"][2]["from"] = "9";
  const std::string message = parse_error(doc);
  EXPECT_NE(message.find("unknown account label \"9\""), std::string::npos) << message;
}

TEST(LoadProblem, SelfTransferRejected) {
  json doc = fixture_document();
  doc["transactions"][0]["to"] = "2";
  EXPECT_NE(parse_error(doc).find("from and to are both \"2\""), std::string::npos);
}

TEST(LoadProblem, MissingKeyAndBadTypes) {
  json doc = fixture_document();
  doc.erase("horizon");
  EXPECT_NE(parse_error(doc).find("missing key \"horizon\""), std::string::npos);
  doc = fixture_document();
  doc["forecasts"][0][1] = "x";
  EXPECT_NE(parse_error(doc).find("expected a number"), std::string::npos);
  doc = fixture_document();
  doc["min_balance"]["1"] = -1;
  EXPECT_FALSE(parse_error(doc).empty());
}

TEST(LoadProblem, MissingFile) {
  EXPECT_THROW(load_problem("/nonexistent/problem.json"), ProblemFileError);
}

TEST(LoadProblem, MalformedJson) {
  TempDir dir;
  detail::write_text_file(dir.path() / "bad.json", "{\"accounts\": [");
  EXPECT_THROW(load_problem(dir.path() / "bad.json"), ProblemFileError);
}

TEST(LoadProblem, ForecastsFromDelimitedFile) {
  TempDir dir;
  json doc = fixture_document();
  // Columns in a different order from the account list.
  detail::write_text_file(dir.path() / "flows.csv", "3,1,2\n0,1,-3\n0,1,-9\n0,6,6\n0,-1,-4\n0,-1,6\n");
  doc["forecasts"] = "flows.csv";
  detail::write_text_file(dir.path() / "problem.json", doc.dump());
  expect_same_instance(load_problem(dir.path() / "problem.json"), test::fixture_instance());
}

TEST(LoadProblem, DelimitedFileWithBadCell) {
  TempDir dir;
  json doc = fixture_document();
  detail::write_text_file(dir.path() / "flows.csv", "1,2,3\n1,-3,0\n1,oops,0\n");
  doc["forecasts"] = "flows.csv";
  detail::write_text_file(dir.path() / "problem.json", doc.dump());
  try {
    load_problem(dir.path() / "problem.json");
    FAIL() << "expected ProblemFileError";
  } catch (const ProblemFileError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
  }
}

TEST(MatrixCsv, WriteAndRead) {
  const DenseMatrix values{{0, 1.5}, {-2, 0.1}};
  const std::string text = write_matrix_csv({"a", "b"}, values);
  EXPECT_EQ(text, "a,b\n0,1.5\n-2,0.1\n");
  const LabeledMatrix parsed = read_matrix_csv(text);
  EXPECT_EQ(parsed.labels, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ(parsed.values, values);
  EXPECT_THROW(read_matrix_csv("a,b\n1\n"), ProblemFileError);
  EXPECT_THROW(write_matrix_csv({"a"}, values), std::invalid_argument);
}

TEST(IoProperties, WriteLoadRoundTrip) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> noise(-1.0, 1.0);
  TempDir dir;
  for (int trial = 0; trial < 50; ++trial) {
    ProblemInstance instance = test::random_instance(rng);
    // Non-integer values exercise the shortest round-trip formatting.
    for (std::size_t t = 0; t < instance.forecasts.rows(); ++t) {
      for (std::size_t j = 0; j < instance.forecasts.cols(); ++j) instance.forecasts(t, j) += noise(rng) / 3.0;
    }
    for (double& c : instance.costs.variable) c += std::abs(noise(rng)) / 7.0;
    const fs::path path = dir.path() / ("p" + std::to_string(trial) + ".json");
    detail::write_text_file(path, write_problem(instance).dump(2));
    expect_same_instance(load_problem(path), instance);
  }
}

TEST(IoProperties, PolicyCsvReparsesExactly) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 50; ++trial) {
    const ProblemInstance instance = test::random_instance(rng);
    const Policy policy = test::random_policy(rng, instance.horizon, instance.system.num_transactions(), 7.0);
    const LabeledMatrix parsed = read_matrix_csv(write_matrix_csv(instance.system.transaction_labels, policy.actions));
    EXPECT_EQ(parsed.labels, instance.system.transaction_labels);
    EXPECT_EQ(parsed.values, policy.actions);
  }
}

TEST(SolutionDocument, CostSolveFields) {
  const ProblemInstance instance = test::fixture_instance();
  const Solution s = solve_cost(instance);
  const json doc = solution_to_json(instance, s, SolveMode::Cost);
  EXPECT_EQ(doc["format_version"], "1");
  EXPECT_EQ(doc["mode"], "cost");
  EXPECT_EQ(doc["status"], "Optimal");
  EXPECT_EQ(doc["objective"].get<double>(), s.objective);
  EXPECT_EQ(doc["period_costs"].size(), 5U);
  EXPECT_EQ(doc["policy"]["matrix"].size(), 5U);
  EXPECT_EQ(doc["policy"]["matrix"][0].size(), 6U);
  EXPECT_EQ(doc["balances"]["matrix"][0].size(), 3U);
  EXPECT_TRUE(doc["stats"].contains("wall_time_ms"));
  EXPECT_FALSE(solution_to_json(instance, s, SolveMode::Cost, std::nullopt, false)["stats"].contains("wall_time_ms"));
  EXPECT_FALSE(doc.contains("risk_params"));
}

TEST(SolutionDocument, RiskSolveCarriesParametersAndCcar) {
  const ProblemInstance instance = test::fixture_instance();
  const RiskParams risk{3000, 5000, 5000, 0.5, 0.5};
  const Solution s = solve_risk(instance, risk);
  const json doc = solution_to_json(instance, s, SolveMode::Risk, risk);
  EXPECT_EQ(doc["mode"], "risk");
  EXPECT_EQ(doc["risk_params"]["cost_ref"].get<double>(), 3000.0);
  EXPECT_EQ(doc["ccar"].get<double>(), empirical_ccar(s.period_costs, 3000));
  EXPECT_EQ(doc["deviations"].size(), 5U);
}

TEST(SolutionDocument, InfeasibleHasNullObjective) {
  Solution s;
  s.status = SolveStatus::Infeasible;
  const json doc = solution_to_json(test::fixture_instance(), s, SolveMode::Cost);
  EXPECT_EQ(doc["status"], "Infeasible");
  EXPECT_TRUE(doc["objective"].is_null());
}

TEST(PlotData, SeriesStartAtInitialBalance) {
  const ProblemInstance instance = test::fixture_instance();
  const Solution s = solve_cost(instance);
  const json doc = plot_data_json(instance, s);
  EXPECT_EQ(doc["periods"].size(), 6U);
  EXPECT_EQ(doc["series"]["1"][0].get<double>(), 5.0);
  EXPECT_EQ(doc["series"]["3"][5].get<double>(), s.balances.balances(4, 2));
  EXPECT_EQ(doc["min_balance"]["2"].get<double>(), 2.0);
}
