// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate.  Each case checks one end-to-end statistical or numerical
// guarantee and prints a single [PASS]/[FAIL] line with the measured values.
// Run a single case with `depthcov_acceptance -tc=<name>`.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "depthcov/bench.hpp"
#include "depthcov/depth.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/estimators.hpp"
#include "depthcov/linalg.hpp"
#include "depthcov/special.hpp"
#include "depthcov/theory.hpp"

using namespace depthcov;

namespace {

void report(const char* name, bool ok, const std::string& detail) {
  std::printf("[%s] %s: %s\n", ok ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
}

double median_of(std::vector<double> v) {
  REQUIRE(!v.empty());
  std::sort(v.begin(), v.end());
  std::size_t h = v.size() / 2;
  return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> losses(const ExperimentResult& result,
                           const std::string& estimator, int n, double eps) {
  std::vector<double> out;
  for (const auto& row : result.rows)
    if (row.estimator == estimator && row.n == n && row.epsilon == eps)
      out.push_back(row.loss);
  return out;
}

double op_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return operator_norm(SymmetricMatrix(a - b));
}

}  // namespace

// The depth-balancing constant: the squared third quartile of a standard
// normal, equivalently the chi-square(1) median.
TEST_CASE("beta_constant_closed_form") {
  const double b = beta_constant();
  const double quartile_resid = std::abs(normal_cdf(std::sqrt(b)) - 0.75);

  // Independent chi-square(1) median by bisection.
  double lo = 0.2, hi = 1.0;
  for (int it = 0; it < 160; ++it) {
    double mid = 0.5 * (lo + hi);
    (chi_squared_cdf(1, mid) < 0.5 ? lo : hi) = mid;
  }
  const double chi2_median = 0.5 * (lo + hi);
  const double median_resid = std::abs(b - chi2_median);

  bool ok = quartile_resid < 1e-12 && median_resid < 1e-10;
  std::ostringstream d;
  d << "beta=" << b << " quartile residual " << quartile_resid
    << ", chi-square median residual " << median_resid;
  report("beta_constant_closed_form", ok, d.str());
  CHECK(ok);
}

// Population anchor: at Gamma = beta * Sigma the empirical matrix depth of
// large Gaussian samples concentrates at 1/2.
TEST_CASE("gaussian_depth_at_half") {
  Eigen::MatrixXd s(3, 3);
  s << 2.0, 0.5, 0.0, 0.5, 1.5, 0.2, 0.0, 0.2, 1.0;
  const SymmetricMatrix sigma(s);
  const SymmetricMatrix gamma(beta_constant() * s);
  const DirectionSet net = build_sphere_net(3, 0.15, 2048, 101);
  REQUIRE(net.count() >= 200);

  double dmin = 1.0, dmax = 0.0;
  int inside = 0;
  for (int rep = 0; rep < 10; ++rep) {
    Dataset data = sample_gaussian(sigma, 100000, seed_combine(202, rep));
    double d = matrix_depth_empirical(gamma, data.points, net).value;
    dmin = std::min(dmin, d);
    dmax = std::max(dmax, d);
    if (d >= 0.49 && d <= 0.51) ++inside;
  }
  bool ok = inside == 10;
  std::ostringstream d;
  d << inside << "/10 seeds in [0.49, 0.51], observed range [" << dmin << ", "
    << dmax << "] over " << net.count() << " directions";
  report("gaussian_depth_at_half", ok, d.str());
  CHECK(ok);
}

// In one dimension the scatter-depth objective is piecewise constant in the
// squared samples; the optimizer must hit the exhaustive-grid optimum
// exactly and land inside the flat argmax set.
TEST_CASE("exact_univariate_maximizer") {
  const DirectionSet net = build_sphere_net(1, 0.25, 8, 7);
  int exact = 0, member = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    Rng rng(seed_combine(303, r));
    const int n = 3 + static_cast<int>(rng.below(48));
    Eigen::MatrixXd data(n, 1);
    const double scale = 0.5 + 2.0 * rng.uniform01();
    for (int i = 0; i < n; ++i) {
      double x = scale * rng.normal();
      if (rng.uniform01() < 0.3) x = std::round(2.0 * x) / 2.0;  // force ties
      if (rng.uniform01() < 0.1) x *= 50.0;
      data(i, 0) = x;
    }

    std::vector<double> sq(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) sq[static_cast<std::size_t>(i)] = data(i, 0) * data(i, 0);
    std::sort(sq.begin(), sq.end());
    auto count_at = [&](double q) {
      int le = 0, ge = 0;
      for (double v : sq) {
        if (v <= q) ++le;
        if (v >= q) ++ge;
      }
      return std::min(le, ge);
    };
    int best = 0;
    for (double v : sq) best = std::max(best, count_at(v));

    EstimatorReport rep = deepest_covariance(data, net);
    const double ghat = rep.estimate.matrix()(0, 0);
    const int got = count_at(ghat);
    if (got == best && std::abs(rep.achieved_depth - static_cast<double>(best) / n) < 1e-12)
      ++exact;
    if (got == best) ++member;
  }
  bool ok = exact == reps && member == reps;
  std::ostringstream d;
  d << exact << "/" << reps << " optima matched exactly, " << member << "/"
    << reps << " estimates inside the flat argmax set";
  report("exact_univariate_maximizer", ok, d.str());
  CHECK(ok);
}

// Clean-data squared error of the depth median decays like 1/n; under
// contamination the error plateaus at the bias floor instead of vanishing.
TEST_CASE("location_error_decay_and_plateau") {
  ExperimentConfig cfg;
  cfg.problem = Problem::Location;
  cfg.n_values = {250, 500, 1000, 2000, 4000};
  cfg.p_values = {5};
  cfg.epsilon_values = {0.0};
  cfg.estimators = {"tukey_median"};
  cfg.trials = 100;
  cfg.master_seed = 41;
  cfg.outlier.kind = "point_mass";
  cfg.outlier.radius = 1e3;
  ExperimentResult clean = run_experiment(cfg);
  RateFit fit = rate_regression(clean, "n", "tukey_median");

  cfg.n_values = {1000, 4000};
  cfg.epsilon_values = {0.1};
  cfg.master_seed = 42;
  ExperimentResult dirty = run_experiment(cfg);
  const double m1 = median_of(losses(dirty, "tukey_median", 1000, 0.1));
  const double m4 = median_of(losses(dirty, "tukey_median", 4000, 0.1));
  const double ratio = m4 / m1;

  bool slope_ok = fit.slope > -1.15 && fit.slope < -0.85;
  bool plateau_ok = ratio >= 0.5;
  bool ok = slope_ok && plateau_ok;
  std::ostringstream d;
  d << "clean log-log slope " << fit.slope << " (target -1 +/- 0.15), "
    << "contaminated median ratio n=4000/n=1000 " << ratio << " (>= 0.5)";
  report("location_error_decay_and_plateau", ok, d.str());
  CHECK(ok);
}

// Coordinatewise medians accumulate the contamination bias across all
// coordinates; the depth median pays it only once.
TEST_CASE("tukey_beats_coordinate_median") {
  const int p = 20, n = 500, trials = 50;
  ContaminationSpec spec;
  spec.epsilon = 0.2;
  spec.inlier = gaussian_inliers(SymmetricMatrix::identity(p));
  spec.outlier = point_mass(Eigen::VectorXd::Ones(p));

  const DirectionSet sphere = build_sphere_net(p, 0.3, 2048, seed_combine(43, "net"));
  const DirectionSet polar = polarization_basis(p);

  std::vector<double> tukey_loss, coord_loss;
  for (int t = 0; t < trials; ++t) {
    Dataset data = sample_contaminated(spec, n, seed_combine(43, t));
    const Eigen::VectorXd cm = coordinate_median(data.points);

    // Rays from the seed through every observation put the contamination
    // axis (and other data-driven directions) into the net, which keeps the
    // empirical depth plateau tight where it matters.
    Eigen::MatrixXd rays(n, p);
    int kept = 0;
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd dir = data.points.row(i).transpose() - cm;
      const double nrm = dir.norm();
      if (nrm > 1e-12) rays.row(kept++) = (dir / nrm).transpose();
    }
    rays.conservativeResize(kept, p);
    std::vector<DirectionSet> parts{sphere, polar, custom_directions(rays)};
    const DirectionSet net = merge_direction_sets(parts);

    LocationReport rep = tukey_median(data.points, net);
    tukey_loss.push_back(rep.estimate.squaredNorm());
    coord_loss.push_back(cm.squaredNorm());
  }

  const double med_tukey = median_of(tukey_loss);
  const double med_coord = median_of(coord_loss);
  const double ratio = med_coord / med_tukey;
  bool ok = ratio >= 3.0;
  std::ostringstream d;
  d << "median squared error: coordinate " << med_coord << ", depth median "
    << med_tukey << ", ratio " << ratio << " (>= 3)";
  report("tukey_beats_coordinate_median", ok, d.str());
  CHECK(ok);
}

// Far point-mass contamination: the depth estimator degrades gracefully and
// stays bounded while the sample covariance is carried away at any eps > 0.
TEST_CASE("scatter_contamination_stability") {
  ExperimentConfig cfg;
  cfg.problem = Problem::CovGeneral;
  cfg.n_values = {4000};
  cfg.p_values = {3};
  cfg.epsilon_values = {0.0, 0.05, 0.1, 0.2};
  cfg.estimators = {"depth_general", "sample_covariance"};
  cfg.trials = 50;
  cfg.master_seed = 44;
  cfg.outlier.kind = "point_mass";
  cfg.outlier.radius = 1e3;
  ExperimentResult result = run_experiment(cfg);

  std::vector<double> depth_med, sample_med;
  for (double eps : cfg.epsilon_values) {
    depth_med.push_back(median_of(losses(result, "depth_general", 4000, eps)));
    sample_med.push_back(median_of(losses(result, "sample_covariance", 4000, eps)));
  }
  bool monotone = true;
  for (std::size_t i = 1; i < depth_med.size(); ++i)
    if (depth_med[i] < depth_med[i - 1]) monotone = false;
  bool strict_ends = depth_med.back() > depth_med.front();
  bool bounded = *std::max_element(depth_med.begin(), depth_med.end()) <= 1.0;
  bool sample_blown = true;
  for (std::size_t i = 1; i < sample_med.size(); ++i)
    if (sample_med[i] <= 1e3) sample_blown = false;

  bool ok = monotone && strict_ends && bounded && sample_blown;
  std::ostringstream d;
  d << "depth medians by eps {";
  for (std::size_t i = 0; i < depth_med.size(); ++i)
    d << (i ? ", " : "") << depth_med[i];
  d << "} (nondecreasing, <= 1.0); sample-covariance medians at eps > 0 all > 1e3: "
    << (sample_blown ? "yes" : "no");
  report("scatter_contamination_stability", ok, d.str());
  CHECK(ok);
}

// Structured direction nets reach resolutions the full sphere cannot afford
// at p = 30, and the restricted optimization must convert that into at
// least a 20% median operator-norm improvement. Structural feasibility of
// the returned estimates is exact.
TEST_CASE("structured_nets_help") {
  const int p = 30, n = 500, trials = 50;
  const double eps = 0.1;
  const double beta = beta_constant();
  const DirectionSet sphere = build_sphere_net(p, 0.25, 2048, 45);

  // Banded truth and nets.
  const int k = 2;
  Eigen::MatrixXd sb = Eigen::MatrixXd::Zero(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = std::max(0, i - k); j <= std::min(p - 1, i + k); ++j)
      sb(i, j) = std::pow(0.4, std::abs(i - j));
  const SymmetricMatrix sigma_banded(sb);
  const DirectionSet banded_net = build_banded_net(p, k, 0.25, 512, 45);

  ContaminationSpec spec;
  spec.epsilon = eps;
  spec.inlier = gaussian_inliers(sigma_banded);
  spec.outlier = point_mass(Eigen::VectorXd::Constant(p, 1e3));

  std::vector<double> err_general_b, err_banded;
  bool banded_feasible = true;
  for (int t = 0; t < trials; ++t) {
    Dataset data = sample_contaminated(spec, n, seed_combine(4501, t));
    EstimatorReport rg = deepest_covariance(data.points, sphere);
    EstimatorReport rb =
        deepest_covariance(data.points, banded_net, StructureClass::banded(k));
    err_general_b.push_back(op_diff(rg.estimate.matrix() / beta, sb));
    err_banded.push_back(op_diff(rb.estimate.matrix() / beta, sb));
    for (int i = 0; i < p && banded_feasible; ++i)
      for (int j = 0; j < p; ++j)
        if (std::abs(i - j) > k && rb.estimate.matrix()(i, j) != 0.0)
          banded_feasible = false;
  }

  // Sparse truth and nets.
  const int s = 3;
  const std::vector<int> rows = {0, 15, 29};
  Eigen::MatrixXd ss = Eigen::MatrixXd::Identity(p, p);
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      ss(rows[a], rows[b]) = 0.5;
      ss(rows[b], rows[a]) = 0.5;
    }
  const SymmetricMatrix sigma_sparse(ss);
  SparseNetOptions opts;
  opts.allow_subsample = true;
  const DirectionSet sparse_net = build_sparse_net(p, s, 0.3, 128, 45, opts);

  spec.inlier = gaussian_inliers(sigma_sparse);
  std::vector<double> err_general_s, err_sparse;
  bool sparse_feasible = true;
  for (int t = 0; t < trials; ++t) {
    Dataset data = sample_contaminated(spec, n, seed_combine(4601, t));
    EstimatorReport rg = deepest_covariance(data.points, sphere);
    EstimatorReport rs =
        deepest_covariance(data.points, sparse_net, StructureClass::sparse(s));
    err_general_s.push_back(op_diff(rg.estimate.matrix() / beta, ss));
    err_sparse.push_back(op_diff(rs.estimate.matrix() / beta, ss));
    if (static_cast<int>(rs.support.size()) > s) sparse_feasible = false;
    std::vector<char> in(static_cast<std::size_t>(p), 0);
    for (int r : rs.support) in[static_cast<std::size_t>(r)] = 1;
    for (int i = 0; i < p && sparse_feasible; ++i)
      for (int j = 0; j < p; ++j)
        if (i != j && !(in[static_cast<std::size_t>(i)] && in[static_cast<std::size_t>(j)]) &&
            rs.estimate.matrix()(i, j) != 0.0)
          sparse_feasible = false;
  }

  const double mg_b = median_of(err_general_b), mb = median_of(err_banded);
  const double mg_s = median_of(err_general_s), ms = median_of(err_sparse);
  bool banded_wins = mb <= 0.8 * mg_b;
  bool sparse_wins = ms <= 0.8 * mg_s;
  bool ok = banded_wins && sparse_wins && banded_feasible && sparse_feasible;
  std::ostringstream d;
  d << "median op error banded " << mb << " vs general " << mg_b << " ("
    << 100.0 * (1.0 - mb / mg_b) << "% better); sparse " << ms << " vs general "
    << mg_s << " (" << 100.0 * (1.0 - ms / mg_s) << "% better); feasibility "
    << (banded_feasible && sparse_feasible ? "exact" : "VIOLATED");
  report("structured_nets_help", ok, d.str());
  CHECK(ok);
}

// Spiked sparse scatter: principal-subspace recovery through the sparse
// depth estimate, with the selected rows covering the true support.
TEST_CASE("sparse_pca_recovery") {
  const int p = 30, s = 3, r = 1, n = 1000, trials = 50;
  const double lambda = 2.0, eps = 0.05;
  const std::vector<int> rows = {0, 15, 29};
  Eigen::VectorXd v = Eigen::VectorXd::Zero(p);
  for (int i : rows) v(i) = 1.0 / std::sqrt(static_cast<double>(s));
  const Eigen::MatrixXd projector = v * v.transpose();
  const SymmetricMatrix sigma(
      (lambda * projector + Eigen::MatrixXd::Identity(p, p)).eval());

  SparseNetOptions opts;
  opts.allow_subsample = true;
  const DirectionSet net = build_sparse_net(p, s, 0.3, 128, 47, opts);

  ContaminationSpec spec;
  spec.epsilon = eps;
  spec.inlier = gaussian_inliers(sigma);
  spec.outlier = point_mass(Eigen::VectorXd::Constant(p, 1e3));

  std::vector<double> loss;
  int recovered = 0;
  for (int t = 0; t < trials; ++t) {
    Dataset data = sample_contaminated(spec, n, seed_combine(4801, t));
    EstimatorReport rep =
        deepest_covariance(data.points, net, StructureClass::sparse(s));
    SparsePcaResult pca = sparse_pca(rep.estimate, r);
    loss.push_back(subspace_loss(pca.projector, projector));
    if (std::includes(rep.support.begin(), rep.support.end(), rows.begin(),
                      rows.end()))
      ++recovered;
  }
  const double med = median_of(loss);
  bool ok = med < 0.2 && recovered >= (trials * 4) / 5;
  std::ostringstream d;
  d << "median subspace loss " << med << " (< 0.2), support recovered in "
    << recovered << "/" << trials << " trials (>= " << (trials * 4) / 5 << ")";
  report("sparse_pca_recovery", ok, d.str());
  CHECK(ok);
}

// The two-sided contamination construction must make the mixtures collide
// pointwise, with the mixing weight tied to the total variation distance.
TEST_CASE("least_favorable_identities") {
  double worst_sup = 0.0, worst_tv = 0.0;
  Rng rng(49);
  for (int rep = 0; rep < 20; ++rep) {
    const double mu1 = -1.0 + 2.0 * rng.uniform01();
    const double mu2 = mu1 + 0.05 + 1.95 * rng.uniform01();
    const double sd1 = 0.5 + 1.5 * rng.uniform01();
    const double sd2 = 0.5 + 1.5 * rng.uniform01();
    const double sd = std::max(sd1, sd2);
    const double lo = mu1 - 10.0 * sd, hi = mu2 + 10.0 * sd;
    DiscretizedLaw p1 = DiscretizedLaw::from_gaussian(mu1, sd1, lo, hi, 1e-3);
    DiscretizedLaw p2 = DiscretizedLaw::from_gaussian(mu2, sd2, lo, hi, 1e-3);
    LeastFavorablePair pair = least_favorable_pair(p1, p2);

    double sup = (pair.m1.mass - pair.m2.mass).cwiseAbs().maxCoeff();
    double tv = tv_distance(p1, p2);
    double tv_resid =
        std::abs(pair.epsilon_prime / (1.0 - pair.epsilon_prime) - tv);
    worst_sup = std::max(worst_sup, sup);
    worst_tv = std::max(worst_tv, tv_resid);
  }
  bool ok = worst_sup < 1e-10 && worst_tv < 1e-10;
  std::ostringstream d;
  d << "worst sup|M1 - M2| " << worst_sup
    << ", worst |eps'/(1-eps') - TV| residual " << worst_tv
    << " over 20 random pairs";
  report("least_favorable_identities", ok, d.str());
  CHECK(ok);
}

// Cauchy inliers have no covariance, yet the canonical scatter is still
// identified by depth; moment-based estimation fails outright.
TEST_CASE("heavy_tail_scatter") {
  ExperimentConfig cfg;
  cfg.problem = Problem::CovGeneral;
  cfg.n_values = {4000};
  cfg.p_values = {3};
  cfg.epsilon_values = {0.05};
  cfg.estimators = {"depth_general", "sample_covariance"};
  cfg.trials = 50;
  cfg.master_seed = 50;
  cfg.inlier.family = "cauchy";
  cfg.outlier.kind = "point_mass";
  cfg.outlier.radius = 1e3;
  ExperimentResult result = run_experiment(cfg);

  const double med_depth = median_of(losses(result, "depth_general", 4000, 0.05));
  std::vector<double> sc = losses(result, "sample_covariance", 4000, 0.05);
  int blown = 0;
  for (double v : sc)
    if (v > 1e2) ++blown;

  bool ok = med_depth < 0.1 && blown >= 45;
  std::ostringstream d;
  d << "depth median squared op error " << med_depth
    << " (< 0.1) against the canonical scatter; sample covariance exceeded 1e2 in "
    << blown << "/50 trials (>= 45)";
  report("heavy_tail_scatter", ok, d.str());
  CHECK(ok);
}

// Additive-contamination breakdown curves: one observation already moves
// the sample covariance past any threshold, while the depth median holds
// out to a constant fraction.
TEST_CASE("breakdown_points") {
  BreakdownEstimator sample_cov;
  sample_cov.fit = [](const Eigen::MatrixXd& data) {
    return sample_covariance(data).matrix();
  };
  sample_cov.distance = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return op_diff(a, b);
  };
  BreakdownConfig cov_cfg;
  cov_cfg.delta = 1.0;
  cov_cfg.n = 100;
  cov_cfg.trials = 30;
  BreakdownResult cov_res = empirical_breakdown(
      sample_cov, gaussian_inliers(SymmetricMatrix::identity(3)),
      point_mass(Eigen::VectorXd::Constant(3, 1e6)), cov_cfg, 51);
  bool cov_ok = cov_res.found && cov_res.epsilon <= 0.02;

  const DirectionSet net = [] {
    std::vector<DirectionSet> parts;
    parts.push_back(build_sphere_net(2, 0.2, 512, 52));
    parts.push_back(polarization_basis(2));
    return merge_direction_sets(parts);
  }();
  BreakdownEstimator tukey;
  tukey.fit = [&net](const Eigen::MatrixXd& data) {
    return Eigen::MatrixXd(tukey_median(data, net).estimate);
  };
  tukey.distance = [](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return (a - b).norm();
  };
  BreakdownConfig loc_cfg;
  loc_cfg.delta = 0.5;
  loc_cfg.n = 200;
  loc_cfg.trials = 30;
  BreakdownResult loc_res = empirical_breakdown(
      tukey, gaussian_inliers(SymmetricMatrix::identity(2)),
      point_mass(Eigen::VectorXd::Constant(2, 10.0)), loc_cfg, 53);
  bool loc_ok = loc_res.epsilon >= 0.25;  // found late or never on the grid

  bool ok = cov_ok && loc_ok;
  std::ostringstream d;
  d << "sample covariance breaks at eps "
    << (cov_res.found ? cov_res.epsilon : -1.0) << " (<= 0.02); depth median "
    << (loc_res.found ? "breaks at eps " : "holds past eps ") << loc_res.epsilon
    << " (>= 0.25)";
  report("breakdown_points", ok, d.str());
  CHECK(ok);
}
