// SPDX-License-Identifier: Apache-2.0
//
// depthcov: command line front end for the depth-based robust scatter
// estimation library.  Exit codes: 0 success, 2 configuration error,
// 3 numeric failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "depthcov/bench.hpp"
#include "depthcov/common.hpp"
#include "depthcov/dataset.hpp"
#include "depthcov/depth.hpp"
#include "depthcov/directions.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/estimators.hpp"
#include "depthcov/linalg.hpp"
#include "depthcov/theory.hpp"

namespace {

using depthcov::invalid_input;

struct NetBuildArgs {
  int dim = 2;
  std::string kind = "sphere";
  double delta = 0.25;
  int budget = 2048;
  int k = 1;
  int s = 1;
  std::uint64_t seed = 0;
  bool allow_subsample = false;
  std::string out;
};

depthcov::DirectionSet build_net_from_args(const NetBuildArgs& a) {
  if (a.kind == "sphere") return depthcov::build_sphere_net(a.dim, a.delta, a.budget, a.seed);
  if (a.kind == "banded")
    return depthcov::build_banded_net(a.dim, a.k, a.delta, a.budget, a.seed);
  if (a.kind == "sparse") {
    depthcov::SparseNetOptions opts;
    opts.allow_subsample = a.allow_subsample;
    return depthcov::build_sparse_net(a.dim, a.s, a.delta, a.budget, a.seed, opts);
  }
  if (a.kind == "polarization") return depthcov::polarization_basis(a.dim);
  throw invalid_input("unknown net kind: " + a.kind);
}

void print_net_summary(const depthcov::DirectionSet& net) {
  std::printf("dim          %d\n", net.dim);
  std::printf("kind         %s\n", depthcov::net_kind_name(net.kind).c_str());
  std::printf("structure    %d\n", net.structure);
  std::printf("count        %d\n", net.count());
  std::printf("delta        %.6g\n", net.delta);
  std::printf("resolution   %.6g\n", net.resolution);
  std::printf("budget_hit   %s\n", net.budget_exhausted ? "yes" : "no");
  std::printf("subsampled   %s\n", net.subsampled ? "yes" : "no");
}

struct EstimateArgs {
  std::string data_path;
  std::string cls = "general";  // general | banded | sparse | location
  int k = 0;
  int s = 1;
  std::string net_path;
  double net_delta = 0.25;
  int net_budget = 2048;
  std::uint64_t net_seed = 0;
  bool labels = false;
  bool sigma_scale = false;
  std::string out;
};

int run_estimate(const EstimateArgs& a) {
  depthcov::Dataset data = depthcov::load_dataset_csv(a.data_path, a.labels);
  const int p = data.p();

  depthcov::DirectionSet net;
  if (!a.net_path.empty()) {
    net = depthcov::load_directions(a.net_path);
    if (net.dim != p) throw invalid_input("net dimension does not match data");
  } else if (a.cls == "location") {
    std::vector<depthcov::DirectionSet> parts;
    parts.push_back(depthcov::build_sphere_net(p, a.net_delta, a.net_budget, a.net_seed));
    parts.push_back(depthcov::polarization_basis(p));
    net = depthcov::merge_direction_sets(parts);
  } else if (a.cls == "banded") {
    net = depthcov::build_banded_net(p, a.k, a.net_delta, a.net_budget, a.net_seed);
  } else if (a.cls == "sparse") {
    depthcov::SparseNetOptions opts;
    opts.allow_subsample = true;
    net = depthcov::build_sparse_net(p, a.s, a.net_delta, a.net_budget, a.net_seed, opts);
  } else if (a.cls == "general") {
    net = depthcov::build_sphere_net(p, a.net_delta, a.net_budget, a.net_seed);
  } else {
    throw invalid_input("unknown estimator class: " + a.cls);
  }

  if (a.cls == "location") {
    depthcov::LocationReport rep = depthcov::tukey_median(data.points, net);
    std::printf("achieved_depth %.17g\n", rep.achieved_depth);
    std::printf("evaluations    %d\n", rep.evaluations);
    std::ostringstream row;
    for (Eigen::Index j = 0; j < rep.estimate.size(); ++j) {
      if (j) row << ' ';
      row << rep.estimate[j];
    }
    std::printf("estimate %s\n", row.str().c_str());
    if (!a.out.empty()) {
      std::ofstream os(a.out);
      if (!os) throw invalid_input("cannot open output file: " + a.out);
      os.precision(17);
      for (Eigen::Index j = 0; j < rep.estimate.size(); ++j)
        os << rep.estimate[j] << "\n";
    }
    return 0;
  }

  depthcov::StructureClass cls = depthcov::StructureClass::general();
  if (a.cls == "banded") cls = depthcov::StructureClass::banded(a.k);
  if (a.cls == "sparse") cls = depthcov::StructureClass::sparse(a.s);
  depthcov::EstimatorReport rep = depthcov::deepest_covariance(data.points, net, cls);
  std::printf("achieved_depth %.17g\n", rep.achieved_depth);
  std::printf("seed_depth     %.17g\n", rep.seed_depth);
  std::printf("sweeps         %d\n", rep.sweeps);
  std::printf("converged      %s\n", rep.converged ? "yes" : "no");
  if (!rep.support.empty()) {
    std::ostringstream sup;
    for (std::size_t i = 0; i < rep.support.size(); ++i) {
      if (i) sup << ' ';
      sup << rep.support[i];
    }
    std::printf("support        %s\n", sup.str().c_str());
  }
  depthcov::SymmetricMatrix result =
      a.sigma_scale ? depthcov::scale_to_sigma(rep.estimate) : rep.estimate;
  if (!a.out.empty()) {
    depthcov::save_matrix(a.out, result);
    std::printf("written        %s\n", a.out.c_str());
  } else {
    std::ostringstream os;
    depthcov::write_matrix(os, result);
    std::fputs(os.str().c_str(), stdout);
  }
  return 0;
}

struct RatesArgs {
  std::string problem = "location";
  std::vector<int> n{1000};
  std::vector<int> p{5};
  std::vector<double> epsilon{0.0};
  int k = 0;
  double alpha = 0;
  int s = 0;
  double lambda = 0;
};

int run_rates(const RatesArgs& a) {
  depthcov::Problem prob = depthcov::problem_from_name(a.problem);
  depthcov::RateParams params;
  params.k = a.k;
  params.alpha = a.alpha;
  params.s = a.s;
  params.lambda = a.lambda;
  std::printf("problem,n,p,params,epsilon,rate\n");
  for (int n : a.n)
    for (int p : a.p)
      for (double eps : a.epsilon) {
        double rate = depthcov::minimax_rate(prob, n, p, params, eps);
        std::printf("%s,%d,%d,k=%d;alpha=%.17g;s=%d;lambda=%.17g,%.17g,%.17g\n",
                    a.problem.c_str(), n, p, params.k, params.alpha, params.s,
                    params.lambda, eps, rate);
      }
  return 0;
}

struct PairArgs {
  double gap = 1.0;
  double sd = 1.0;
  double step = 1e-3;
  double margin = 10.0;
};

int run_pair(const PairArgs& a) {
  if (!(a.gap != 0)) throw invalid_input("pair needs a nonzero mean gap");
  double lo = std::min(0.0, a.gap) - a.margin * a.sd;
  double hi = std::max(0.0, a.gap) + a.margin * a.sd;
  auto p1 = depthcov::DiscretizedLaw::from_gaussian(0.0, a.sd, lo, hi, a.step);
  auto p2 = depthcov::DiscretizedLaw::from_gaussian(a.gap, a.sd, lo, hi, a.step);
  double tv = depthcov::tv_distance(p1, p2);
  auto pair = depthcov::least_favorable_pair(p1, p2);
  double sup = (pair.m1.mass - pair.m2.mass).cwiseAbs().maxCoeff();
  std::printf("tv             %.17g\n", tv);
  std::printf("epsilon_prime  %.17g\n", pair.epsilon_prime);
  std::printf("mixture_gap    %.3e\n", sup);
  std::printf("kl_p1_p2       %.17g\n", depthcov::kl_divergence(p1, p2));
  return 0;
}

depthcov::InlierLaw inlier_from_json(const nlohmann::json& j, int p) {
  std::string family = j.value("family", std::string("gaussian"));
  if (family == "gaussian")
    return depthcov::gaussian_inliers(depthcov::SymmetricMatrix::identity(p));
  depthcov::EllipticalKind kind;
  int dof = j.value("dof", 3);
  if (family == "laplacian")
    kind = depthcov::EllipticalKind::Laplacian;
  else if (family == "student_t")
    kind = depthcov::EllipticalKind::StudentT;
  else if (family == "cauchy")
    kind = depthcov::EllipticalKind::Cauchy;
  else
    throw invalid_input("unknown inlier family: " + family);
  auto fam = depthcov::calibrate_canonical(depthcov::make_elliptical(kind, p, dof));
  return depthcov::elliptical_inliers(fam, depthcov::SymmetricMatrix::identity(p));
}

depthcov::OutlierLaw outlier_from_json(const nlohmann::json& j, int p) {
  std::string kind = j.value("kind", std::string("point_mass"));
  double radius = j.value("radius", 1e3);
  if (kind == "point_mass")
    return depthcov::point_mass(Eigen::VectorXd::Constant(p, radius));
  if (kind == "far_gaussian") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    mu[0] = radius;
    return depthcov::far_gaussian(mu, depthcov::SymmetricMatrix::identity(p));
  }
  if (kind == "heavy_tail") return depthcov::heavy_tail(j.value("dof", 1));
  throw invalid_input("unknown outlier kind: " + kind);
}

int run_breakdown(const std::string& config_path) {
  std::ifstream in(config_path);
  if (!in) throw invalid_input("cannot open config file: " + config_path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw invalid_input(std::string("config parse error: ") + e.what());
  }

  const int p = j.value("p", 2);
  if (p < 1) throw invalid_input("breakdown needs p >= 1");
  depthcov::BreakdownConfig cfg;
  cfg.delta = j.value("delta", 1.0);
  cfg.n = j.value("n", 100);
  cfg.trials = j.value("trials", 30);
  cfg.exceed_prob = j.value("exceed_prob", 0.1);
  cfg.eps_step = j.value("eps_step", 0.02);
  cfg.eps_max = j.value("eps_max", 0.5);
  const auto seed = j.value("seed", static_cast<std::uint64_t>(0));
  const std::string estimator = j.value("estimator", std::string("sample_covariance"));
  double net_delta = 0.25;
  int net_budget = 2048;
  if (j.contains("net")) {
    net_delta = j["net"].value("delta", 0.25);
    net_budget = j["net"].value("budget", 2048);
  }

  depthcov::InlierLaw inlier =
      inlier_from_json(j.value("inlier", nlohmann::json::object()), p);
  depthcov::OutlierLaw outlier =
      outlier_from_json(j.value("outlier", nlohmann::json::object()), p);

  depthcov::BreakdownEstimator est;
  auto op_distance = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return depthcov::operator_norm(depthcov::SymmetricMatrix(a - b));
  };
  auto vec_distance = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm();
  };
  if (estimator == "sample_covariance") {
    est.fit = [](const Eigen::MatrixXd& d) {
      return depthcov::sample_covariance(d).matrix();
    };
    est.distance = op_distance;
  } else if (estimator == "tukey_median" || estimator == "coordinate_median") {
    auto net = std::make_shared<depthcov::DirectionSet>([&] {
      std::vector<depthcov::DirectionSet> parts;
      parts.push_back(depthcov::build_sphere_net(p, net_delta, net_budget, seed));
      parts.push_back(depthcov::polarization_basis(p));
      return depthcov::merge_direction_sets(parts);
    }());
    if (estimator == "tukey_median")
      est.fit = [net](const Eigen::MatrixXd& d) -> Eigen::MatrixXd {
        return depthcov::tukey_median(d, *net).estimate;
      };
    else
      est.fit = [](const Eigen::MatrixXd& d) -> Eigen::MatrixXd {
        return depthcov::coordinate_median(d);
      };
    est.distance = vec_distance;
  } else if (estimator == "depth_general") {
    auto net = std::make_shared<depthcov::DirectionSet>(
        depthcov::build_sphere_net(p, net_delta, net_budget, seed));
    est.fit = [net](const Eigen::MatrixXd& d) {
      return depthcov::deepest_covariance(d, *net).estimate.matrix();
    };
    est.distance = op_distance;
  } else {
    throw invalid_input("unknown breakdown estimator: " + estimator);
  }

  auto result = depthcov::empirical_breakdown(est, inlier, outlier, cfg, seed);
  std::printf("estimator   %s\n", estimator.c_str());
  std::printf("delta       %.6g\n", cfg.delta);
  if (result.found)
    std::printf("breakdown   %.6g\n", result.epsilon);
  else
    std::printf("breakdown   %.6g+ (grid exhausted)\n", cfg.eps_max);
  std::printf("epsilon,exceed_probability\n");
  for (std::size_t i = 0; i < result.grid_epsilon.size(); ++i)
    std::printf("%.6g,%.6g\n", result.grid_epsilon[i], result.grid_probability[i]);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Depth-based robust location and scatter estimation toolkit"};
  app.require_subcommand(1);

  // net build / net inspect
  auto* net = app.add_subcommand("net", "Build or inspect direction nets");
  net->require_subcommand(1);
  NetBuildArgs nb;
  auto* net_build = net->add_subcommand("build", "Construct a direction net");
  net_build->add_option("--dim", nb.dim, "Ambient dimension")->required();
  net_build->add_option("--kind", nb.kind, "sphere|banded|sparse|polarization");
  net_build->add_option("--delta", nb.delta, "Target covering radius");
  net_build->add_option("--budget", nb.budget, "Direction budget");
  net_build->add_option("--k", nb.k, "Band half-width (banded)");
  net_build->add_option("--s", nb.s, "Sparsity level (sparse)");
  net_build->add_option("--seed", nb.seed, "Seed for randomized constructions");
  net_build->add_flag("--allow-subsample", nb.allow_subsample,
                      "Permit sparse support subsampling");
  net_build->add_option("--out", nb.out, "Output path")->required();

  std::string inspect_path;
  int inspect_probes = 0;
  std::uint64_t inspect_seed = 0;
  auto* net_inspect = net->add_subcommand("inspect", "Summarize a stored net");
  net_inspect->add_option("file", inspect_path, "Net file")->required();
  net_inspect->add_option("--probes", inspect_probes,
                          "Monte Carlo covering-radius probes");
  net_inspect->add_option("--seed", inspect_seed, "Probe seed");

  // estimate
  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "Fit a depth estimator to CSV data");
  estimate->add_option("data", ea.data_path, "Input CSV (rows = samples)")->required();
  estimate->add_option("--class", ea.cls, "general|banded|sparse|location");
  estimate->add_option("--k", ea.k, "Band half-width");
  estimate->add_option("--s", ea.s, "Sparsity level");
  estimate->add_option("--net", ea.net_path, "Stored net file (else built)");
  estimate->add_option("--net-delta", ea.net_delta, "Net covering radius");
  estimate->add_option("--net-budget", ea.net_budget, "Net budget");
  estimate->add_option("--net-seed", ea.net_seed, "Net seed");
  estimate->add_flag("--labels", ea.labels, "Input has a final label column");
  estimate->add_flag("--sigma-scale", ea.sigma_scale,
                     "Report the covariance scale (divide by beta)");
  estimate->add_option("--out", ea.out, "Write the estimate to a file");

  // bench
  std::string bench_config, bench_csv, bench_plots;
  auto* bench = app.add_subcommand("bench", "Run a configured Monte Carlo sweep");
  bench->add_option("config", bench_config, "JSON experiment config")->required();
  bench->add_option("--csv", bench_csv, "Override the output CSV path");
  bench->add_option("--plots", bench_plots, "Override the plot directory");

  // theory rates / pair
  auto* theory = app.add_subcommand("theory", "Rate tables and lower-bound pairs");
  theory->require_subcommand(1);
  RatesArgs ra;
  auto* rates = theory->add_subcommand("rates", "Print a minimax rate table (CSV)");
  rates->add_option("--problem", ra.problem, "Problem name");
  rates->add_option("--n", ra.n, "Sample sizes");
  rates->add_option("--p", ra.p, "Dimensions");
  rates->add_option("--epsilon", ra.epsilon, "Contamination levels");
  rates->add_option("--k", ra.k, "Band half-width");
  rates->add_option("--alpha", ra.alpha, "Bandable decay");
  rates->add_option("--s", ra.s, "Sparsity level");
  rates->add_option("--lambda", ra.lambda, "Spike size");

  PairArgs pa;
  auto* pair = theory->add_subcommand("pair", "Construct a least-favorable pair");
  pair->add_option("--gap", pa.gap, "Mean separation");
  pair->add_option("--sd", pa.sd, "Common standard deviation");
  pair->add_option("--step", pa.step, "Grid step");
  pair->add_option("--margin", pa.margin, "Grid margin in sd units");

  // breakdown
  std::string breakdown_config;
  auto* breakdown = app.add_subcommand("breakdown", "Empirical breakdown scan");
  breakdown->add_option("config", breakdown_config, "JSON breakdown config")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (net_build->parsed()) {
      auto built = build_net_from_args(nb);
      depthcov::save_directions(nb.out, built);
      print_net_summary(built);
      return 0;
    }
    if (net_inspect->parsed()) {
      auto loaded = depthcov::load_directions(inspect_path);
      print_net_summary(loaded);
      if (inspect_probes > 0)
        std::printf("covering_est %.6g\n",
                    depthcov::covering_radius_estimate(loaded, inspect_probes,
                                                       inspect_seed));
      return 0;
    }
    if (estimate->parsed()) return run_estimate(ea);
    if (bench->parsed()) {
      depthcov::ExperimentConfig cfg = depthcov::load_config(bench_config);
      if (!bench_csv.empty()) cfg.output_csv = bench_csv;
      if (!bench_plots.empty()) cfg.plot_dir = bench_plots;
      depthcov::ExperimentResult result = depthcov::run_experiment(cfg);
      int failures = 0;
      for (const auto& row : result.rows)
        if (!row.error.empty()) ++failures;
      std::printf("rows     %zu\n", result.rows.size());
      std::printf("failures %d\n", failures);
      if (!cfg.output_csv.empty()) std::printf("csv      %s\n", cfg.output_csv.c_str());
      return 0;
    }
    if (rates->parsed()) return run_rates(ra);
    if (pair->parsed()) return run_pair(pa);
    if (breakdown->parsed()) return run_breakdown(breakdown_config);
    std::fprintf(stderr, "no subcommand selected\n");
    return 2;
  } catch (const invalid_input& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
