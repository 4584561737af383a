#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "depthcov/bench.hpp"
#include "depthcov/common.hpp"

using namespace depthcov;

namespace {

ExperimentConfig tiny_location_config() {
  ExperimentConfig cfg;
  cfg.problem = Problem::Location;
  cfg.n_values = {60};
  cfg.p_values = {2};
  cfg.epsilon_values = {0.0, 0.1};
  cfg.estimators = {"coordinate_median", "mean"};
  cfg.trials = 3;
  cfg.master_seed = 77;
  cfg.outlier.kind = "point_mass";
  cfg.outlier.radius = 100.0;
  cfg.net.delta = 0.3;
  cfg.net.budget = 256;
  return cfg;
}

}  // namespace

TEST_CASE("config json round trip") {
  ExperimentConfig cfg;
  cfg.problem = Problem::CovSparse;
  cfg.n_values = {100, 200};
  cfg.p_values = {10};
  cfg.epsilon_values = {0.0, 0.05};
  cfg.params.s = 2;
  cfg.estimators = {"depth_sparse", "sample_covariance"};
  cfg.trials = 4;
  cfg.master_seed = 99;
  cfg.inlier.family = "student_t";
  cfg.inlier.dof = 4;
  cfg.outlier.kind = "far_gaussian";
  cfg.outlier.radius = 50.0;
  cfg.record_runtime = true;
  cfg.net.delta = 0.2;
  cfg.net.budget = 333;

  auto back = config_from_json(config_to_json(cfg));
  CHECK(back.problem == cfg.problem);
  CHECK(back.n_values == cfg.n_values);
  CHECK(back.p_values == cfg.p_values);
  CHECK(back.epsilon_values == cfg.epsilon_values);
  CHECK(back.params.s == cfg.params.s);
  CHECK(back.estimators == cfg.estimators);
  CHECK(back.trials == cfg.trials);
  CHECK(back.master_seed == cfg.master_seed);
  CHECK(back.inlier.family == cfg.inlier.family);
  CHECK(back.inlier.dof == cfg.inlier.dof);
  CHECK(back.outlier.kind == cfg.outlier.kind);
  CHECK(back.outlier.radius == cfg.outlier.radius);
  CHECK(back.record_runtime == cfg.record_runtime);
  CHECK(back.net.delta == cfg.net.delta);
  CHECK(back.net.budget == cfg.net.budget);
}

TEST_CASE("config accepts scalars for grid axes") {
  auto cfg = config_from_json(R"({
    "problem": "location", "n": 50, "p": 2, "epsilon": 0.0,
    "estimators": ["mean"], "trials": 1
  })");
  CHECK(cfg.n_values == std::vector<int>{50});
  CHECK(cfg.p_values == std::vector<int>{2});
  CHECK(cfg.epsilon_values == std::vector<double>{0.0});
}

TEST_CASE("config validation rejects bad input") {
  CHECK_THROWS_AS(config_from_json("{not json"), invalid_input);
  CHECK_THROWS_AS(config_from_json(R"({"problem": "nope", "n": 10, "p": 2,
    "epsilon": 0, "estimators": ["mean"]})"),
                  invalid_input);
  // Estimator not defined for the problem.
  CHECK_THROWS_AS(config_from_json(R"({"problem": "location", "n": 10, "p": 2,
    "epsilon": 0, "estimators": ["depth_general"]})"),
                  invalid_input);
  CHECK_THROWS_AS(config_from_json(R"({"problem": "location", "n": 10, "p": 2,
    "epsilon": 0.9999, "estimators": ["mean"], "trials": 0})"),
                  invalid_input);
  CHECK_THROWS_AS(config_from_json(R"({"problem": "cov_banded", "n": 10, "p": 2,
    "epsilon": 0, "k": 5, "estimators": ["depth_banded"]})"),
                  invalid_input);
}

TEST_CASE("known estimators per problem") {
  auto loc = known_estimators(Problem::Location);
  CHECK(std::find(loc.begin(), loc.end(), "tukey_median") != loc.end());
  CHECK(std::find(loc.begin(), loc.end(), "coordinate_median") != loc.end());
  CHECK(std::find(loc.begin(), loc.end(), "mean") != loc.end());
  auto spca = known_estimators(Problem::Spca);
  CHECK(std::find(spca.begin(), spca.end(), "depth_spca") != spca.end());
  CHECK(std::find(spca.begin(), spca.end(), "sample_pca") != spca.end());
  auto banded = known_estimators(Problem::CovBanded);
  CHECK(std::find(banded.begin(), banded.end(), "depth_banded") != banded.end());
  CHECK(std::find(banded.begin(), banded.end(), "depth_general") != banded.end());
}

TEST_CASE("experiment rows are deterministic and ordered") {
  auto cfg = tiny_location_config();
  auto r1 = run_experiment(cfg);
  auto r2 = run_experiment(cfg);
  REQUIRE(r1.rows.size() == r2.rows.size());
  CHECK(results_to_csv(r1) == results_to_csv(r2));

  // 2 eps values x 3 trials x 2 estimators.
  CHECK(r1.rows.size() == 12);
  // Ordering: grid index, then trial, then the configured estimator order.
  CHECK(r1.rows[0].epsilon == 0.0);
  CHECK(r1.rows[0].trial == 0);
  CHECK(r1.rows[0].estimator == "coordinate_median");
  CHECK(r1.rows[1].estimator == "mean");
  CHECK(r1.rows[2].trial == 1);
  CHECK(r1.rows.back().epsilon == 0.1);

  // The same dataset seed feeds every estimator of a trial.
  CHECK(r1.rows[0].seed == r1.rows[1].seed);
  CHECK(r1.rows[0].seed != r1.rows[2].seed);
}

TEST_CASE("worker count does not change results") {
  auto cfg = tiny_location_config();
  setenv("DEPTHCOV_THREADS", "1", 1);
  auto serial = run_experiment(cfg);
  setenv("DEPTHCOV_THREADS", "3", 1);
  auto parallel = run_experiment(cfg);
  unsetenv("DEPTHCOV_THREADS");
  CHECK(results_to_csv(serial) == results_to_csv(parallel));
}

TEST_CASE("csv schema and special values") {
  ExperimentResult result;
  result.config = tiny_location_config();
  ResultRow row;
  row.problem = "location";
  row.n = 60;
  row.p = 2;
  row.epsilon = 0.1;
  row.estimator = "mean";
  row.trial = 0;
  row.loss = std::numeric_limits<double>::quiet_NaN();
  row.depth = 0.25;
  row.seed = 42;
  result.rows.push_back(row);
  row.loss = std::numeric_limits<double>::infinity();
  row.trial = 1;
  result.rows.push_back(row);

  const std::string csv = results_to_csv(result);
  CHECK(csv.rfind("problem,n,p,epsilon,estimator,trial,loss,depth,runtime_ms,seed\n",
                  0) == 0);
  CHECK(csv.find("location,60,2,0.1,mean,0,nan,0.25,0,42\n") != std::string::npos);
  CHECK(csv.find("location,60,2,0.1,mean,1,inf,0.25,0,42\n") != std::string::npos);
}

TEST_CASE("csv doubles survive a parse round trip") {
  auto cfg = tiny_location_config();
  auto result = run_experiment(cfg);
  const std::string csv = results_to_csv(result);
  // Re-parse the loss column and compare bit patterns.
  std::size_t pos = csv.find('\n') + 1;
  for (const auto& row : result.rows) {
    std::size_t end = csv.find('\n', pos);
    std::string line = csv.substr(pos, end - pos);
    int col = 0;
    std::size_t start = 0;
    std::string loss_field;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        if (col == 6) loss_field = line.substr(start, i - start);
        ++col;
        start = i + 1;
      }
    }
    CHECK(std::stod(loss_field) == row.loss);
    pos = end + 1;
  }
}

TEST_CASE("runtime column stays zero unless opted in") {
  auto cfg = tiny_location_config();
  auto rows = run_experiment(cfg).rows;
  for (const auto& r : rows) CHECK(r.runtime_ms == 0.0);
  cfg.record_runtime = true;
  auto timed = run_experiment(cfg).rows;
  bool any_positive = false;
  for (const auto& r : timed) any_positive = any_positive || r.runtime_ms > 0;
  CHECK(any_positive);
}

TEST_CASE("replay reproduces each row loss") {
  auto cfg = tiny_location_config();
  auto result = run_experiment(cfg);
  for (const auto& row : result.rows) {
    CHECK(replay_row_loss(cfg, row) == row.loss);
  }
}

TEST_CASE("contaminated mean loses to the median in the rows") {
  auto cfg = tiny_location_config();
  cfg.trials = 5;
  auto result = run_experiment(cfg);
  double mean_loss = 0, med_loss = 0;
  int count = 0;
  for (const auto& row : result.rows) {
    if (row.epsilon == 0.0) continue;
    if (row.estimator == "mean") {
      mean_loss += row.loss;
      ++count;
    }
    if (row.estimator == "coordinate_median") med_loss += row.loss;
  }
  REQUIRE(count == 5);
  CHECK(mean_loss > 10 * med_loss);
}

TEST_CASE("clean covariance runs near the truth at large n") {
  ExperimentConfig cfg;
  cfg.problem = Problem::CovGeneral;
  cfg.n_values = {10000};
  cfg.p_values = {2};
  cfg.epsilon_values = {0.0};
  cfg.estimators = {"depth_general"};
  cfg.trials = 50;
  cfg.master_seed = 31;
  auto result = run_experiment(cfg);
  std::vector<double> losses;
  for (const auto& row : result.rows) losses.push_back(row.loss);
  REQUIRE(losses.size() == 50);
  std::sort(losses.begin(), losses.end());
  const double median = 0.5 * (losses[24] + losses[25]);
  CHECK(median < 0.05);
}

TEST_CASE("rate regression recovers an exact power law") {
  ExperimentResult result;
  result.config = tiny_location_config();
  result.config.estimators = {"mean"};
  for (int trial = 0; trial < 3; ++trial) {
    for (int n : {100, 200, 400, 800}) {
      ResultRow row;
      row.problem = "location";
      row.n = n;
      row.p = 2;
      row.estimator = "mean";
      row.trial = trial;
      row.loss = 7.0 / n;
      result.rows.push_back(row);
    }
  }
  auto fit = rate_regression(result, "n", "mean");
  CHECK(fit.points == 4);
  CHECK(fit.slope == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(7.0)).epsilon(1e-12));
  CHECK(fit.slope_stderr < 1e-12);

  CHECK_THROWS_AS(rate_regression(result, "n", "never_ran"), invalid_input);
  CHECK_THROWS_AS(rate_regression(result, "bogus_axis", "mean"), invalid_input);
}

TEST_CASE("plots are emitted per problem") {
  namespace fs = std::filesystem;
  auto cfg = tiny_location_config();
  cfg.n_values = {40, 80};
  auto result = run_experiment(cfg);
  const auto dir = fs::temp_directory_path() / "depthcov_plot_test";
  fs::remove_all(dir);
  auto paths = emit_plots(result, dir.string());
  REQUIRE(paths.size() == 1);
  std::ifstream in(paths[0]);
  REQUIRE(in.good());
  std::string svg((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("coordinate_median") != std::string::npos);
  CHECK(svg.find("mean") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("experiment writes its csv when asked") {
  namespace fs = std::filesystem;
  auto cfg = tiny_location_config();
  cfg.trials = 1;
  const auto path = fs::temp_directory_path() / "depthcov_bench_test.csv";
  cfg.output_csv = path.string();
  auto result = run_experiment(cfg);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string content((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
  CHECK(content == results_to_csv(result));
  fs::remove(path);
}
