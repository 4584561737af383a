// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_BENCH_HPP
#define DEPTHCOV_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "depthcov/directions.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/estimators.hpp"
#include "depthcov/theory.hpp"

namespace depthcov {

struct OutlierConfig {
  std::string kind = "point_mass";  // point_mass | far_gaussian | heavy_tail
  double radius = 1e3;              // point_mass: R * ones; far_gaussian: mean R * e1
  int dof = 1;                      // heavy_tail
};

struct InlierConfig {
  std::string family = "gaussian";  // gaussian | laplacian | student_t | cauchy
  int dof = 3;                      // student_t
};

struct NetConfig {
  double delta = 0.25;
  int budget = 2048;
};

struct ExperimentConfig {
  Problem problem = Problem::Location;
  std::vector<int> n_values{500};
  std::vector<int> p_values{2};
  std::vector<double> epsilon_values{0.0};
  RateParams params;   // k, alpha, s, lambda
  int r = 1;           // spca subspace rank
  InlierConfig inlier;
  OutlierConfig outlier;
  std::vector<std::string> estimators;
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::string output_csv;  // empty: caller writes
  std::string plot_dir;    // empty: no plots
  // runtime_ms is written as 0 unless enabled: wall-clock values would break
  // the byte-for-byte determinism of the output.
  bool record_runtime = false;
  NetConfig net;
};

ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);
ExperimentConfig load_config(const std::string& path);

struct ResultRow {
  std::string problem;
  int n = 0;
  int p = 0;
  double epsilon = 0;
  std::string estimator;
  int trial = 0;
  double loss = 0;     // NaN marks a failed estimator run
  double depth = 0;    // empirical depth of the reported estimate
  double runtime_ms = 0;
  std::uint64_t seed = 0;  // dataset seed: hash(master_seed, grid index, trial)
  std::string error;       // failure detail; not serialized
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<ResultRow> rows;  // ordered by (grid index, trial, estimator)
};

// Runs the full sweep.  Worker count: DEPTHCOV_THREADS when set, else the
// hardware count; rows land in deterministic order regardless.
ExperimentResult run_experiment(const ExperimentConfig& config);

// Fixed schema: problem,n,p,epsilon,estimator,trial,loss,depth,runtime_ms,seed
std::string results_to_csv(const ExperimentResult& result);
void write_results_csv(const ExperimentResult& result, const std::string& path);

// Recomputes one row's loss from its stored dataset seed; replay support for
// the loss-consistency contract.
double replay_row_loss(const ExperimentConfig& config, const ResultRow& row);

struct RateFit {
  double slope = 0;
  double intercept = 0;
  double slope_stderr = 0;
  int points = 0;  // distinct x values used
};

// Least-squares fit of log(median loss) against log(x) for one estimator;
// x_axis is one of "n", "p", "epsilon".
RateFit rate_regression(const ExperimentResult& result,
                        const std::string& x_axis,
                        const std::string& estimator);

// One SVG per problem: log-log median-loss curves per estimator plus a
// dashed minimax reference curve anchored at the first point.  Returns the
// written paths.
std::vector<std::string> emit_plots(const ExperimentResult& result,
                                    const std::string& dir);

// Names accepted in ExperimentConfig::estimators for each problem.
std::vector<std::string> known_estimators(Problem problem);

}  // namespace depthcov

#endif  // DEPTHCOV_BENCH_HPP
