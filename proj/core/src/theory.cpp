// SPDX-License-Identifier: Apache-2.0
#include "depthcov/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthcov/common.hpp"
#include "depthcov/special.hpp"

namespace depthcov {

void DiscretizedLaw::validate() const {
  if (grid.size() < 1 || grid.size() != mass.size())
    throw invalid_input("discretized law shape mismatch");
  for (Eigen::Index i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1]))
      throw invalid_input("discretized law grid must be strictly increasing");
  if ((mass.array() < 0).any())
    throw invalid_input("discretized law mass must be nonnegative");
  if (std::abs(mass.sum() - 1.0) > 1e-12)
    throw invalid_input("discretized law mass must sum to 1");
}

DiscretizedLaw DiscretizedLaw::from_gaussian(double mean, double sd, double lo,
                                             double hi, double step) {
  if (!(sd > 0) || !(step > 0) || !(lo < hi))
    throw invalid_input("bad gaussian discretization parameters");
  const auto count = static_cast<Eigen::Index>(std::floor((hi - lo) / step)) + 1;
  if (count < 2) throw invalid_input("grid too coarse for the range");
  DiscretizedLaw law;
  law.grid.resize(count);
  law.mass.resize(count);
  for (Eigen::Index i = 0; i < count; ++i) {
    double x = lo + step * static_cast<double>(i);
    law.grid[i] = x;
    double a = (x - 0.5 * step - mean) / sd;
    double b = (x + 0.5 * step - mean) / sd;
    law.mass[i] = normal_cdf(b) - normal_cdf(a);
  }
  double total = law.mass.sum();
  if (!(total > 0)) throw numeric_error("discretization lost all mass");
  law.mass /= total;
  law.validate();
  return law;
}

namespace {

void check_common_grid(const DiscretizedLaw& p, const DiscretizedLaw& q) {
  p.validate();
  q.validate();
  if (p.grid.size() != q.grid.size())
    throw invalid_input("laws live on different grids");
  if ((p.grid - q.grid).cwiseAbs().maxCoeff() > 1e-12)
    throw invalid_input("laws live on different grids");
}

}  // namespace

double tv_distance(const DiscretizedLaw& p, const DiscretizedLaw& q) {
  check_common_grid(p, q);
  return 0.5 * (p.mass - q.mass).cwiseAbs().sum();
}

double kl_divergence(const DiscretizedLaw& p, const DiscretizedLaw& q) {
  check_common_grid(p, q);
  double acc = 0;
  for (Eigen::Index i = 0; i < p.mass.size(); ++i) {
    double pi = p.mass[i];
    if (pi <= 0) continue;
    double qi = q.mass[i];
    if (qi <= 0) return std::numeric_limits<double>::infinity();
    acc += pi * std::log(pi / qi);
  }
  return acc;
}

double modulus_location(double epsilon) {
  if (epsilon < 0 || epsilon >= 1) throw invalid_input("epsilon must lie in [0, 1)");
  return 4.0 * epsilon * epsilon;
}

double modulus_covariance(double epsilon) {
  if (epsilon < 0 || epsilon >= 1) throw invalid_input("epsilon must lie in [0, 1)");
  return epsilon * epsilon;
}

double modulus_spca(double epsilon, double lambda) {
  if (epsilon < 0 || epsilon >= 1) throw invalid_input("epsilon must lie in [0, 1)");
  if (!(lambda > 0)) throw invalid_input("lambda must be positive");
  return std::min(1.0, epsilon * epsilon / (lambda * lambda));
}

LeastFavorablePair least_favorable_pair(const DiscretizedLaw& p1,
                                        const DiscretizedLaw& p2) {
  double tv = tv_distance(p1, p2);
  if (!(tv > 0)) throw invalid_input("identical laws admit no contamination pair");

  LeastFavorablePair pair;
  pair.epsilon_prime = tv / (1.0 + tv);
  pair.q1.grid = p1.grid;
  pair.q2.grid = p1.grid;
  pair.q1.mass = (p2.mass - p1.mass).cwiseMax(0.0) / tv;
  pair.q2.mass = (p1.mass - p2.mass).cwiseMax(0.0) / tv;
  double e = pair.epsilon_prime;
  pair.m1.grid = p1.grid;
  pair.m2.grid = p1.grid;
  pair.m1.mass = (1.0 - e) * p1.mass + e * pair.q1.mass;
  pair.m2.mass = (1.0 - e) * p2.mass + e * pair.q2.mass;
  return pair;
}

std::string problem_name(Problem p) {
  switch (p) {
    case Problem::Location: return "location";
    case Problem::CovGeneral: return "cov_general";
    case Problem::CovBanded: return "cov_banded";
    case Problem::CovBandable: return "cov_bandable";
    case Problem::CovSparse: return "cov_sparse";
    case Problem::Spca: return "spca";
  }
  throw invalid_input("unknown problem");
}

Problem problem_from_name(const std::string& name) {
  if (name == "location") return Problem::Location;
  if (name == "cov_general") return Problem::CovGeneral;
  if (name == "cov_banded") return Problem::CovBanded;
  if (name == "cov_bandable") return Problem::CovBandable;
  if (name == "cov_sparse") return Problem::CovSparse;
  if (name == "spca") return Problem::Spca;
  throw invalid_input("unknown problem name: " + name);
}

double minimax_rate(Problem problem, int n, int p, const RateParams& params,
                    double epsilon) {
  if (n < 1 || p < 1) throw invalid_input("rate needs n, p >= 1");
  if (epsilon < 0 || epsilon >= 1) throw invalid_input("epsilon must lie in [0, 1)");
  const double dn = n;
  const double dp = p;
  double clean = 0;
  double contam = epsilon * epsilon;
  switch (problem) {
    case Problem::Location:
    case Problem::CovGeneral:
      clean = dp / dn;
      break;
    case Problem::CovBanded:
      if (params.k < 0) throw invalid_input("banded rate needs k >= 0");
      clean = (params.k + std::log(dp)) / dn;
      break;
    case Problem::CovBandable: {
      if (!(params.alpha > 0)) throw invalid_input("bandable rate needs alpha > 0");
      double smooth = std::pow(dn, -2.0 * params.alpha / (2.0 * params.alpha + 1.0)) +
                      std::log(dp) / dn;
      clean = std::min(smooth, dp / dn);
      break;
    }
    case Problem::CovSparse: {
      if (params.s < 1 || params.s > p) throw invalid_input("sparse rate needs 1 <= s <= p");
      double s = params.s;
      clean = s * std::log(M_E * dp / s) / dn;
      break;
    }
    case Problem::Spca: {
      if (params.s < 1 || params.s > p) throw invalid_input("spca rate needs 1 <= s <= p");
      if (!(params.lambda > 0)) throw invalid_input("spca rate needs lambda > 0");
      double s = params.s;
      clean = s * std::log(M_E * dp / s) / (dn * params.lambda * params.lambda);
      contam = std::min(1.0, epsilon * epsilon / (params.lambda * params.lambda));
      break;
    }
  }
  return std::max(clean, contam);
}

BreakdownResult empirical_breakdown(const BreakdownEstimator& estimator,
                                    const InlierLaw& inliers,
                                    const OutlierLaw& outliers,
                                    const BreakdownConfig& config,
                                    std::uint64_t seed) {
  if (!estimator.fit || !estimator.distance)
    throw invalid_input("breakdown estimator is incomplete");
  if (config.trials < 30) throw invalid_input("breakdown needs trials >= 30");
  if (config.n < 1 || !(config.delta > 0) || !(config.eps_step > 0))
    throw invalid_input("bad breakdown configuration");
  const int p = inliers.dim();

  // One inlier panel and clean fit per trial, shared across the eps grid.
  ContaminationSpec clean_spec;
  clean_spec.epsilon = 0;
  clean_spec.inlier = inliers;
  clean_spec.outlier = point_mass(Eigen::VectorXd::Zero(p));
  std::vector<Eigen::MatrixXd> panels;
  std::vector<Eigen::MatrixXd> clean_fits;
  panels.reserve(static_cast<std::size_t>(config.trials));
  clean_fits.reserve(static_cast<std::size_t>(config.trials));
  for (int t = 0; t < config.trials; ++t) {
    Dataset d = sample_contaminated(
        clean_spec, config.n, seed_combine(seed_combine(seed, "inliers"), t));
    panels.push_back(d.points);
    clean_fits.push_back(estimator.fit(d.points));
  }

  BreakdownResult result;
  int grid_count =
      static_cast<int>(std::floor(config.eps_max / config.eps_step + 1e-9)) + 1;
  for (int g = 0; g < grid_count; ++g) {
    double eps = config.eps_step * g;
    int exceed = 0;
    for (int t = 0; t < config.trials; ++t) {
      Rng rng(seed_combine(seed_combine(seed_combine(seed, "labels"), g), t));
      Eigen::MatrixXd dirty = panels[static_cast<std::size_t>(t)];
      bool touched = false;
      for (int i = 0; i < config.n; ++i) {
        if (rng.uniform01() <= eps) {
          dirty.row(i) = outliers.sample(rng, p).transpose();
          touched = true;
        }
      }
      double move = 0;
      if (touched)
        move = estimator.distance(clean_fits[static_cast<std::size_t>(t)],
                                  estimator.fit(dirty));
      if (move > config.delta) ++exceed;
    }
    double prob = static_cast<double>(exceed) / config.trials;
    result.grid_epsilon.push_back(eps);
    result.grid_probability.push_back(prob);
    if (prob > config.exceed_prob) {
      result.found = true;
      result.epsilon = eps;
      return result;
    }
  }
  result.found = false;
  result.epsilon = config.eps_max;
  return result;
}

}  // namespace depthcov
