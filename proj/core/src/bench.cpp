// SPDX-License-Identifier: Apache-2.0
#include "depthcov/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "depthcov/common.hpp"
#include "depthcov/depth.hpp"

namespace depthcov {

namespace {

using json = nlohmann::ordered_json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double median_of(std::vector<double> v) {
  if (v.empty()) throw invalid_input("median of empty range");
  std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Ground truth per problem.

struct ProblemSetup {
  Eigen::VectorXd theta;       // location truth
  SymmetricMatrix scatter = SymmetricMatrix::identity(1);  // Sigma or Gamma
  Eigen::MatrixXd projector;   // spca truth
  std::vector<int> support;    // sparse / spca rows carrying structure
};

std::vector<int> spread_support(int p, int s) {
  std::vector<int> out;
  if (s == 1) return {0};
  for (int t = 0; t < s; ++t) {
    long idx = std::lround(static_cast<double>(t) * (p - 1) / (s - 1));
    out.push_back(static_cast<int>(idx));
  }
  return out;
}

ProblemSetup build_truth(Problem problem, int p, const RateParams& params, int r) {
  ProblemSetup setup;
  setup.theta = Eigen::VectorXd::Zero(p);
  switch (problem) {
    case Problem::Location:
    case Problem::CovGeneral:
      setup.scatter = SymmetricMatrix::identity(p);
      break;
    case Problem::CovBanded: {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = std::max(0, i - params.k); j <= std::min(p - 1, i + params.k); ++j)
          m(i, j) = std::pow(0.4, std::abs(i - j));
      setup.scatter = SymmetricMatrix(m);
      break;
    }
    case Problem::CovBandable: {
      Eigen::MatrixXd m(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) m(i, j) = std::pow(0.6, std::abs(i - j));
      setup.scatter = SymmetricMatrix(m);
      break;
    }
    case Problem::CovSparse: {
      setup.support = spread_support(p, params.s);
      Eigen::MatrixXd m = Eigen::MatrixXd::Identity(p, p);
      for (std::size_t a = 0; a < setup.support.size(); ++a)
        for (std::size_t b = a + 1; b < setup.support.size(); ++b) {
          m(setup.support[a], setup.support[b]) = 0.5;
          m(setup.support[b], setup.support[a]) = 0.5;
        }
      setup.scatter = SymmetricMatrix(m);
      break;
    }
    case Problem::Spca: {
      setup.support = spread_support(p, params.s);
      const int s = params.s;
      Eigen::MatrixXd v = Eigen::MatrixXd::Zero(p, r);
      if (r == 1) {
        for (int t = 0; t < s; ++t)
          v(setup.support[static_cast<std::size_t>(t)], 0) = 1.0 / std::sqrt(s);
      } else {
        Eigen::MatrixXd raw(s, r);
        for (int i = 0; i < s; ++i)
          for (int j = 0; j < r; ++j) raw(i, j) = std::sin((i + 1.0) * (j + 1.0));
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(raw);
        Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(s, r);
        for (int t = 0; t < s; ++t) v.row(setup.support[static_cast<std::size_t>(t)]) = q.row(t);
      }
      setup.projector = v * v.transpose();
      setup.scatter =
          SymmetricMatrix(params.lambda * setup.projector + Eigen::MatrixXd::Identity(p, p));
      break;
    }
  }
  return setup;
}

// ---------------------------------------------------------------------------
// Config plumbing.

const char* outlier_kinds[] = {"point_mass", "far_gaussian", "heavy_tail"};
const char* inlier_families[] = {"gaussian", "laplacian", "student_t", "cauchy"};

bool is_one_of(const std::string& v, const char* const* list, std::size_t count) {
  for (std::size_t i = 0; i < count; ++i)
    if (v == list[i]) return true;
  return false;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.n_values.empty() || cfg.p_values.empty() || cfg.epsilon_values.empty())
    throw invalid_input("all sweep lists must be nonempty");
  for (int n : cfg.n_values)
    if (n < 1) throw invalid_input("sweep n values must be >= 1");
  for (int p : cfg.p_values)
    if (p < 1) throw invalid_input("sweep p values must be >= 1");
  for (double e : cfg.epsilon_values)
    if (e < 0 || e >= 1) throw invalid_input("sweep epsilon values must lie in [0, 1)");
  if (cfg.trials < 1) throw invalid_input("trials must be >= 1");
  if (cfg.estimators.empty()) throw invalid_input("estimator list must be nonempty");
  auto known = known_estimators(cfg.problem);
  for (const auto& e : cfg.estimators)
    if (std::find(known.begin(), known.end(), e) == known.end())
      throw invalid_input("estimator '" + e + "' is not defined for problem '" +
                          problem_name(cfg.problem) + "'");
  if (!is_one_of(cfg.inlier.family, inlier_families, 4))
    throw invalid_input("unknown inlier family: " + cfg.inlier.family);
  if (cfg.inlier.family == "student_t" && cfg.inlier.dof < 1)
    throw invalid_input("student_t inliers need dof >= 1");
  if (!is_one_of(cfg.outlier.kind, outlier_kinds, 3))
    throw invalid_input("unknown outlier kind: " + cfg.outlier.kind);
  if (cfg.outlier.kind == "heavy_tail" && cfg.outlier.dof < 1)
    throw invalid_input("heavy_tail outliers need dof >= 1");
  if (!(cfg.net.delta > 0) || cfg.net.budget < 1)
    throw invalid_input("net parameters must be positive");

  const int pmin = *std::min_element(cfg.p_values.begin(), cfg.p_values.end());
  switch (cfg.problem) {
    case Problem::Location:
    case Problem::CovGeneral:
      break;
    case Problem::CovBanded:
      if (cfg.params.k < 0 || cfg.params.k >= pmin)
        throw invalid_input("banded problem needs 0 <= k < p");
      break;
    case Problem::CovBandable:
      if (!(cfg.params.alpha > 0)) throw invalid_input("bandable problem needs alpha > 0");
      break;
    case Problem::CovSparse:
      if (cfg.params.s < 1 || cfg.params.s > pmin)
        throw invalid_input("sparse problem needs 1 <= s <= p");
      break;
    case Problem::Spca:
      if (cfg.params.s < 1 || cfg.params.s > pmin)
        throw invalid_input("spca problem needs 1 <= s <= p");
      if (cfg.r < 1 || cfg.r > cfg.params.s)
        throw invalid_input("spca problem needs 1 <= r <= s");
      if (!(cfg.params.lambda > 0)) throw invalid_input("spca problem needs lambda > 0");
      break;
  }
}

}  // namespace

std::vector<std::string> known_estimators(Problem problem) {
  switch (problem) {
    case Problem::Location:
      return {"tukey_median", "coordinate_median", "mean"};
    case Problem::CovGeneral:
      return {"depth_general", "sample_covariance"};
    case Problem::CovBanded:
    case Problem::CovBandable:
      return {"depth_banded", "depth_general", "sample_covariance"};
    case Problem::CovSparse:
      return {"depth_sparse", "depth_general", "sample_covariance"};
    case Problem::Spca:
      return {"depth_spca", "sample_pca"};
  }
  throw invalid_input("unknown problem");
}

namespace {

// Scalars are accepted wherever a grid axis expects an array.
template <typename T>
std::vector<T> axis_values(const json& j, const char* key) {
  const json& v = j.at(key);
  if (v.is_array()) return v.get<std::vector<T>>();
  return {v.get<T>()};
}

}  // namespace

ExperimentConfig config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw invalid_input(std::string("config parse error: ") + e.what());
  }
  ExperimentConfig cfg;
  try {
    cfg.problem = problem_from_name(j.at("problem").get<std::string>());
    cfg.n_values = axis_values<int>(j, "n");
    cfg.p_values = axis_values<int>(j, "p");
    cfg.epsilon_values = axis_values<double>(j, "epsilon");
    cfg.params.k = j.value("k", 0);
    cfg.params.alpha = j.value("alpha", 0.0);
    cfg.params.s = j.value("s", 0);
    cfg.params.lambda = j.value("lambda", 0.0);
    cfg.r = j.value("r", 1);
    if (j.contains("inlier")) {
      cfg.inlier.family = j["inlier"].value("family", std::string("gaussian"));
      cfg.inlier.dof = j["inlier"].value("dof", 3);
    }
    if (j.contains("outlier")) {
      cfg.outlier.kind = j["outlier"].value("kind", std::string("point_mass"));
      cfg.outlier.radius = j["outlier"].value("radius", 1e3);
      cfg.outlier.dof = j["outlier"].value("dof", 1);
    }
    cfg.estimators = j.at("estimators").get<std::vector<std::string>>();
    cfg.trials = j.value("trials", 1);
    cfg.master_seed = j.value("master_seed", static_cast<std::uint64_t>(0));
    cfg.output_csv = j.value("output_csv", std::string());
    cfg.plot_dir = j.value("plot_dir", std::string());
    cfg.record_runtime = j.value("record_runtime", false);
    if (j.contains("net")) {
      cfg.net.delta = j["net"].value("delta", 0.25);
      cfg.net.budget = j["net"].value("budget", 2048);
    }
  } catch (const json::exception& e) {
    throw invalid_input(std::string("config field error: ") + e.what());
  }
  validate_config(cfg);
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["problem"] = problem_name(cfg.problem);
  j["n"] = cfg.n_values;
  j["p"] = cfg.p_values;
  j["epsilon"] = cfg.epsilon_values;
  j["k"] = cfg.params.k;
  j["alpha"] = cfg.params.alpha;
  j["s"] = cfg.params.s;
  j["lambda"] = cfg.params.lambda;
  j["r"] = cfg.r;
  j["inlier"] = {{"family", cfg.inlier.family}, {"dof", cfg.inlier.dof}};
  j["outlier"] = {{"kind", cfg.outlier.kind},
                  {"radius", cfg.outlier.radius},
                  {"dof", cfg.outlier.dof}};
  j["estimators"] = cfg.estimators;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["output_csv"] = cfg.output_csv;
  j["plot_dir"] = cfg.plot_dir;
  j["record_runtime"] = cfg.record_runtime;
  j["net"] = {{"delta", cfg.net.delta}, {"budget", cfg.net.budget}};
  return j.dump(2) + "\n";
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw invalid_input("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

// ---------------------------------------------------------------------------
// Experiment engine.

namespace {

struct NetCache {
  std::map<std::string, std::shared_ptr<const DirectionSet>> nets;

  static std::string key(const std::string& tag, int p, int param) {
    return tag + ":" + std::to_string(p) + ":" + std::to_string(param);
  }

  const DirectionSet& get(const std::string& tag, int p, int param) const {
    auto it = nets.find(key(tag, p, param));
    if (it == nets.end()) throw numeric_error("direction net missing from cache");
    return *it->second;
  }

  void put(const std::string& tag, int p, int param, DirectionSet net) {
    auto k = key(tag, p, param);
    if (!nets.count(k))
      nets.emplace(k, std::make_shared<const DirectionSet>(std::move(net)));
  }
};

int effective_bandwidth(const ExperimentConfig& cfg, int n, int p) {
  int k = cfg.problem == Problem::CovBandable
              ? bandable_bandwidth(n, cfg.params.alpha)
              : cfg.params.k;
  return std::min(k, p - 1);
}

void build_nets(const ExperimentConfig& cfg, NetCache& cache) {
  const std::uint64_t net_seed = seed_combine(cfg.master_seed, "net");
  const double delta = cfg.net.delta;
  const int budget = cfg.net.budget;
  SparseNetOptions sparse_opts;
  sparse_opts.allow_subsample = true;

  for (int p : cfg.p_values) {
    if (cfg.problem == Problem::Location) {
      std::vector<DirectionSet> parts;
      parts.push_back(build_sphere_net(p, delta, budget, net_seed));
      parts.push_back(polarization_basis(p));
      cache.put("location", p, 0, merge_direction_sets(parts));
      continue;
    }
    bool need_sphere = cfg.problem == Problem::CovGeneral;
    for (const auto& e : cfg.estimators)
      if (e == "depth_general") need_sphere = true;
    if (need_sphere)
      cache.put("sphere", p, 0, build_sphere_net(p, delta, budget, net_seed));

    if (cfg.problem == Problem::CovBanded || cfg.problem == Problem::CovBandable) {
      for (int n : cfg.n_values) {
        int k = effective_bandwidth(cfg, n, p);
        if (!cache.nets.count(NetCache::key("banded", p, k)))
          cache.put("banded", p, k, build_banded_net(p, k, delta, budget, net_seed));
      }
    }
    if (cfg.problem == Problem::CovSparse || cfg.problem == Problem::Spca)
      cache.put("sparse", p, cfg.params.s,
                build_sparse_net(p, cfg.params.s, delta, budget, net_seed, sparse_opts));
  }
}

ContaminationSpec make_spec(const ExperimentConfig& cfg, const ProblemSetup& setup,
                            double epsilon, int p) {
  ContaminationSpec spec;
  spec.epsilon = epsilon;
  if (cfg.inlier.family == "gaussian") {
    spec.inlier = gaussian_inliers(setup.scatter);
  } else {
    EllipticalKind kind = EllipticalKind::Gaussian;
    int dof = 0;
    if (cfg.inlier.family == "laplacian") kind = EllipticalKind::Laplacian;
    if (cfg.inlier.family == "student_t") {
      kind = EllipticalKind::StudentT;
      dof = cfg.inlier.dof;
    }
    if (cfg.inlier.family == "cauchy") kind = EllipticalKind::Cauchy;
    EllipticalFamily fam = calibrate_canonical(make_elliptical(kind, p, dof));
    spec.inlier = elliptical_inliers(fam, setup.scatter);
  }
  if (cfg.outlier.kind == "point_mass") {
    spec.outlier = point_mass(Eigen::VectorXd::Constant(p, cfg.outlier.radius));
  } else if (cfg.outlier.kind == "far_gaussian") {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(p);
    mu[0] = cfg.outlier.radius;
    spec.outlier = far_gaussian(mu, SymmetricMatrix::identity(p));
  } else {
    spec.outlier = heavy_tail(cfg.outlier.dof);
  }
  return spec;
}

double op_norm_sq_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double v = operator_norm(SymmetricMatrix(a - b));
  return v * v;
}

// The depth machinery estimates the canonical scatter Gamma natively; under
// Gaussian inliers Gamma = beta * Sigma. Covariance losses are measured on
// the Gamma scale for every inlier family so the metric is uniform.
bool gamma_is_estimand(const ExperimentConfig& cfg) {
  return cfg.inlier.family != "gaussian";
}

struct EstimatorOutcome {
  double loss = kNaN;
  double depth = kNaN;
};

EstimatorOutcome run_one_estimator(const ExperimentConfig& cfg,
                                   const ProblemSetup& setup,
                                   const NetCache& nets,
                                   const std::string& name,
                                   const Eigen::MatrixXd& data, int n, int p) {
  EstimatorOutcome out;
  const bool gamma_scale = gamma_is_estimand(cfg);
  const double beta = beta_constant();

  const Eigen::MatrixXd gamma_truth =
      gamma_scale ? setup.scatter.matrix()
                  : (beta * setup.scatter.matrix()).eval();

  auto cov_loss = [&](const SymmetricMatrix& gamma_hat) {
    return op_norm_sq_diff(gamma_hat.matrix(), gamma_truth);
  };
  auto sample_cov_loss = [&](const SymmetricMatrix& sigma_hat) {
    return op_norm_sq_diff(sigma_hat.matrix(), gamma_truth);
  };

  if (cfg.problem == Problem::Location) {
    const DirectionSet& net = nets.get("location", p, 0);
    if (name == "tukey_median") {
      LocationReport rep = tukey_median(data, net);
      out.loss = (rep.estimate - setup.theta).squaredNorm();
      out.depth = rep.achieved_depth;
      return out;
    }
    Eigen::VectorXd est;
    if (name == "coordinate_median")
      est = coordinate_median(data);
    else if (name == "mean")
      est = data.colwise().mean().transpose();
    else
      throw invalid_input("unknown location estimator: " + name);
    out.loss = (est - setup.theta).squaredNorm();
    out.depth = tukey_depth_empirical(est, data, net).value;
    return out;
  }

  // Net carrying the problem's structural restriction, for depth reporting.
  auto problem_net = [&]() -> const DirectionSet& {
    switch (cfg.problem) {
      case Problem::CovBanded:
      case Problem::CovBandable:
        return nets.get("banded", p, effective_bandwidth(cfg, n, p));
      case Problem::CovSparse:
      case Problem::Spca:
        return nets.get("sparse", p, cfg.params.s);
      default:
        return nets.get("sphere", p, 0);
    }
  };

  if (name == "depth_general") {
    EstimatorReport rep =
        deepest_covariance(data, nets.get("sphere", p, 0), StructureClass::general());
    out.loss = cov_loss(rep.estimate);
    out.depth = rep.achieved_depth;
  } else if (name == "depth_banded") {
    int k = effective_bandwidth(cfg, n, p);
    EstimatorReport rep = deepest_covariance(data, nets.get("banded", p, k),
                                             StructureClass::banded(k));
    out.loss = cov_loss(rep.estimate);
    out.depth = rep.achieved_depth;
  } else if (name == "depth_sparse") {
    EstimatorReport rep = deepest_covariance(data, nets.get("sparse", p, cfg.params.s),
                                             StructureClass::sparse(cfg.params.s));
    out.loss = cov_loss(rep.estimate);
    out.depth = rep.achieved_depth;
  } else if (name == "sample_covariance") {
    SymmetricMatrix sc = sample_covariance(data);
    out.loss = sample_cov_loss(sc);
    Eigen::MatrixXd gamma_equiv = gamma_scale ? sc.matrix() : beta * sc.matrix();
    out.depth =
        matrix_depth_empirical(SymmetricMatrix(gamma_equiv), data, problem_net()).value;
  } else if (name == "depth_spca") {
    EstimatorReport rep = deepest_covariance(data, nets.get("sparse", p, cfg.params.s),
                                             StructureClass::sparse(cfg.params.s));
    SparsePcaResult pca = sparse_pca(rep.estimate, cfg.r);
    out.loss = subspace_loss(pca.projector, setup.projector);
    out.depth = rep.achieved_depth;
  } else if (name == "sample_pca") {
    SymmetricMatrix sc = sample_covariance(data);
    SparsePcaResult pca = sparse_pca(sc, cfg.r);
    out.loss = subspace_loss(pca.projector, setup.projector);
    Eigen::MatrixXd gamma_equiv = gamma_scale ? sc.matrix() : beta * sc.matrix();
    out.depth =
        matrix_depth_empirical(SymmetricMatrix(gamma_equiv), data, problem_net()).value;
  } else {
    throw invalid_input("unknown estimator: " + name);
  }
  return out;
}

int worker_count(std::size_t tasks) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  if (const char* env = std::getenv("DEPTHCOV_THREADS")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) hw = static_cast<int>(std::min<long>(v, 256));
  }
  return static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(hw), tasks));
}

struct GridPoint {
  int index = 0;
  int n = 0;
  int p = 0;
  double epsilon = 0;
};

std::vector<GridPoint> enumerate_grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> grid;
  int idx = 0;
  for (int n : cfg.n_values)
    for (int p : cfg.p_values)
      for (double eps : cfg.epsilon_values) {
        grid.push_back({idx, n, p, eps});
        ++idx;
      }
  return grid;
}

std::uint64_t dataset_seed(const ExperimentConfig& cfg, int grid_index, int trial) {
  return seed_combine(seed_combine(seed_combine(cfg.master_seed, "data"), grid_index),
                      trial);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  validate_config(cfg);
  NetCache nets;
  build_nets(cfg, nets);

  std::map<int, ProblemSetup> setups;  // by p
  for (int p : cfg.p_values)
    setups.emplace(p, build_truth(cfg.problem, p, cfg.params, cfg.r));

  const auto grid = enumerate_grid(cfg);
  const std::size_t n_est = cfg.estimators.size();
  ExperimentResult result;
  result.config = cfg;
  result.rows.resize(grid.size() * static_cast<std::size_t>(cfg.trials) * n_est);

  const std::size_t task_count = grid.size() * static_cast<std::size_t>(cfg.trials);
  std::atomic<std::size_t> next_task{0};

  auto work = [&]() {
    for (;;) {
      std::size_t task = next_task.fetch_add(1);
      if (task >= task_count) return;
      const GridPoint& g = grid[task / static_cast<std::size_t>(cfg.trials)];
      const int trial = static_cast<int>(task % static_cast<std::size_t>(cfg.trials));
      const ProblemSetup& setup = setups.at(g.p);
      const std::uint64_t seed = dataset_seed(cfg, g.index, trial);

      Eigen::MatrixXd data;
      std::string sample_error;
      try {
        ContaminationSpec spec = make_spec(cfg, setup, g.epsilon, g.p);
        data = sample_contaminated(spec, g.n, seed).points;
      } catch (const std::exception& e) {
        sample_error = e.what();
      }

      for (std::size_t ei = 0; ei < n_est; ++ei) {
        ResultRow row;
        row.problem = problem_name(cfg.problem);
        row.n = g.n;
        row.p = g.p;
        row.epsilon = g.epsilon;
        row.estimator = cfg.estimators[ei];
        row.trial = trial;
        row.seed = seed;
        row.loss = kNaN;
        row.depth = kNaN;
        if (!sample_error.empty()) {
          row.error = sample_error;
        } else {
          auto start = std::chrono::steady_clock::now();
          try {
            EstimatorOutcome out =
                run_one_estimator(cfg, setup, nets, cfg.estimators[ei], data, g.n, g.p);
            row.loss = out.loss;
            row.depth = out.depth;
          } catch (const std::exception& e) {
            row.error = e.what();
          }
          if (cfg.record_runtime) {
            auto stop = std::chrono::steady_clock::now();
            row.runtime_ms =
                std::chrono::duration<double, std::milli>(stop - start).count();
          }
        }
        std::size_t slot =
            (static_cast<std::size_t>(g.index) * static_cast<std::size_t>(cfg.trials) +
             static_cast<std::size_t>(trial)) *
                n_est +
            ei;
        result.rows[slot] = std::move(row);
      }
    }
  };

  const int workers = worker_count(task_count);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  if (!cfg.output_csv.empty()) write_results_csv(result, cfg.output_csv);
  if (!cfg.plot_dir.empty()) emit_plots(result, cfg.plot_dir);
  return result;
}

std::string results_to_csv(const ExperimentResult& result) {
  std::string out = "problem,n,p,epsilon,estimator,trial,loss,depth,runtime_ms,seed\n";
  for (const auto& row : result.rows) {
    out += row.problem;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    out += std::to_string(row.p);
    out += ',';
    out += format_double(row.epsilon);
    out += ',';
    out += row.estimator;
    out += ',';
    out += std::to_string(row.trial);
    out += ',';
    out += format_double(row.loss);
    out += ',';
    out += format_double(row.depth);
    out += ',';
    out += format_double(row.runtime_ms);
    out += ',';
    out += std::to_string(row.seed);
    out += '\n';
  }
  return out;
}

void write_results_csv(const ExperimentResult& result, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot open output file: " + path);
  out << results_to_csv(result);
  if (!out) throw numeric_error("failed writing results to " + path);
}

double replay_row_loss(const ExperimentConfig& cfg, const ResultRow& row) {
  NetCache nets;
  build_nets(cfg, nets);
  ProblemSetup setup = build_truth(cfg.problem, row.p, cfg.params, cfg.r);
  ContaminationSpec spec = make_spec(cfg, setup, row.epsilon, row.p);
  Eigen::MatrixXd data = sample_contaminated(spec, row.n, row.seed).points;
  return run_one_estimator(cfg, setup, nets, row.estimator, data, row.n, row.p).loss;
}

RateFit rate_regression(const ExperimentResult& result, const std::string& x_axis,
                        const std::string& estimator) {
  std::map<double, std::vector<double>> groups;
  for (const auto& row : result.rows) {
    if (row.estimator != estimator) continue;
    if (!std::isfinite(row.loss)) continue;
    double x;
    if (x_axis == "n")
      x = row.n;
    else if (x_axis == "p")
      x = row.p;
    else if (x_axis == "epsilon")
      x = row.epsilon;
    else
      throw invalid_input("x_axis must be one of n, p, epsilon");
    groups[x].push_back(row.loss);
  }
  if (groups.size() < 3)
    throw invalid_input("rate regression needs at least 3 distinct grid values");

  std::vector<double> lx, ly;
  for (auto& [x, losses] : groups) {
    double med = median_of(losses);
    if (!(x > 0) || !(med > 0))
      throw invalid_input("rate regression needs positive x and positive median loss");
    lx.push_back(std::log(x));
    ly.push_back(std::log(med));
  }
  const auto m = static_cast<double>(lx.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sx += lx[i];
    sy += ly[i];
  }
  double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0)) throw invalid_input("rate regression x values are degenerate");
  RateFit fit;
  fit.points = static_cast<int>(lx.size());
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ss_res = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    double r = ly[i] - (fit.intercept + fit.slope * lx[i]);
    ss_res += r * r;
  }
  fit.slope_stderr =
      lx.size() > 2 ? std::sqrt(ss_res / (m - 2.0) / sxx) : 0.0;
  return fit;
}

// ---------------------------------------------------------------------------
// SVG plots.

namespace {

const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, median loss)
  bool dashed = false;
};

std::string svg_plot(const std::string& title, const std::string& x_label,
                     bool x_log, const std::vector<PlotSeries>& series) {
  const double width = 720, height = 540;
  const double ml = 80, mr = 24, mt = 40, mb = 60;
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      double tx = x_log ? std::log10(x) : x;
      double ty = std::log10(y);
      xmin = std::min(xmin, tx);
      xmax = std::max(xmax, tx);
      ymin = std::min(ymin, ty);
      ymax = std::max(ymax, ty);
    }
  if (!(xmin <= xmax)) throw invalid_input("no plottable points");
  if (xmax - xmin < 1e-12) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (ymax - ymin < 1e-12) {
    ymin -= 0.5;
    ymax += 0.5;
  }
  auto px = [&](double x) {
    double tx = x_log ? std::log10(x) : x;
    return ml + (tx - xmin) / (xmax - xmin) * (width - ml - mr);
  };
  auto py = [&](double y) {
    double ty = std::log10(y);
    return height - mb - (ty - ymin) / (ymax - ymin) * (height - mt - mb);
  };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << " "
      << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\""
      << width - mr << "\" y2=\"" << height - mb
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
      << "\" y2=\"" << height - mb << "\" stroke=\"black\" stroke-width=\"1\"/>\n";

  const int ticks = 5;
  for (int t = 0; t < ticks; ++t) {
    double fx = xmin + (xmax - xmin) * t / (ticks - 1);
    double vx = x_log ? std::pow(10.0, fx) : fx;
    double gx = ml + (fx - xmin) / (xmax - xmin) * (width - ml - mr);
    char label[32];
    std::snprintf(label, sizeof label, "%.3g", vx);
    svg << "<line x1=\"" << gx << "\" y1=\"" << height - mb << "\" x2=\"" << gx
        << "\" y2=\"" << height - mb + 5 << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << gx << "\" y=\"" << height - mb + 20
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << label << "</text>\n";
    double fy = ymin + (ymax - ymin) * t / (ticks - 1);
    double gy = height - mb - (fy - ymin) / (ymax - ymin) * (height - mt - mb);
    std::snprintf(label, sizeof label, "%.3g", std::pow(10.0, fy));
    svg << "<line x1=\"" << ml - 5 << "\" y1=\"" << gy << "\" x2=\"" << ml
        << "\" y2=\"" << gy << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << gy + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << label << "</text>\n";
  }
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 16
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << x_label << (x_log ? " (log)" : "") << "</text>\n";
  svg << "<text x=\"20\" y=\"" << (mt + height - mb) / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
      << "transform=\"rotate(-90 20 " << (mt + height - mb) / 2
      << ")\">median loss (log)</text>\n";

  int color_idx = 0;
  double legend_y = mt + 10;
  for (const auto& s : series) {
    const char* color = s.dashed ? "#555555" : palette[color_idx % 8];
    if (!s.dashed) ++color_idx;
    if (s.points.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << color
          << "\" stroke-width=\"2\"";
      if (s.dashed) svg << " stroke-dasharray=\"6 4\"";
      svg << " points=\"";
      for (auto [x, y] : s.points) svg << px(x) << "," << py(y) << " ";
      svg << "\"/>\n";
    }
    if (!s.dashed)
      for (auto [x, y] : s.points)
        svg << "<circle cx=\"" << px(x) << "\" cy=\"" << py(y)
            << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    svg << "<text x=\"" << width - mr - 8 << "\" y=\"" << legend_y
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
        << "fill=\"" << color << "\">" << s.label << "</text>\n";
    legend_y += 16;
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace

std::vector<std::string> emit_plots(const ExperimentResult& result,
                                    const std::string& dir) {
  if (result.rows.empty()) throw invalid_input("no results to plot");
  if (result.config.estimators.empty()) throw invalid_input("no estimators to plot");
  std::filesystem::create_directories(dir);

  const ExperimentConfig& cfg = result.config;
  // Sweep axis: prefer the n sweep, then epsilon, then p.
  std::string axis = "n";
  if (cfg.n_values.size() > 1)
    axis = "n";
  else if (cfg.epsilon_values.size() > 1)
    axis = "epsilon";
  else if (cfg.p_values.size() > 1)
    axis = "p";
  bool x_log = true;
  auto x_of = [&](const ResultRow& r) -> double {
    if (axis == "n") return r.n;
    if (axis == "p") return r.p;
    return r.epsilon;
  };
  if (axis == "epsilon")
    for (double e : cfg.epsilon_values)
      if (e <= 0) x_log = false;

  std::vector<PlotSeries> series;
  for (const auto& est : cfg.estimators) {
    std::map<double, std::vector<double>> groups;
    for (const auto& row : result.rows)
      if (row.estimator == est && std::isfinite(row.loss) && row.loss > 0)
        groups[x_of(row)].push_back(row.loss);
    PlotSeries s;
    s.label = est;
    for (auto& [x, losses] : groups) s.points.emplace_back(x, median_of(losses));
    if (!s.points.empty()) series.push_back(std::move(s));
  }
  if (series.empty()) throw invalid_input("no finite positive losses to plot");

  // Reference rate curve, anchored at the first series' first point.
  if (series[0].points.size() > 1) {
    PlotSeries ref;
    ref.label = "minimax rate (shape)";
    ref.dashed = true;
    const auto& anchor = series[0].points.front();
    int n0 = cfg.n_values.front();
    int p0 = cfg.p_values.front();
    double e0 = cfg.epsilon_values.front();
    auto rate_at = [&](double x) {
      int n = axis == "n" ? static_cast<int>(x) : n0;
      int p = axis == "p" ? static_cast<int>(x) : p0;
      double eps = axis == "epsilon" ? x : e0;
      return minimax_rate(cfg.problem, n, p, cfg.params, eps);
    };
    double base = rate_at(anchor.first);
    if (base > 0) {
      double scale = anchor.second / base;
      for (const auto& [x, y] : series[0].points) {
        (void)y;
        double r = rate_at(x) * scale;
        if (r > 0) ref.points.emplace_back(x, r);
      }
      if (ref.points.size() > 1) series.push_back(std::move(ref));
    }
  }

  std::string problem = problem_name(cfg.problem);
  std::string path = dir + "/" + problem + ".svg";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot open plot file: " + path);
  out << svg_plot(problem, axis, x_log, series);
  if (!out) throw numeric_error("failed writing plot " + path);
  return {path};
}

}  // namespace depthcov
