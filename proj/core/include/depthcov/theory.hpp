// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_THEORY_HPP
#define DEPTHCOV_THEORY_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <string>

#include "depthcov/distributions.hpp"

namespace depthcov {

// One-dimensional law on a fixed grid; the executable substrate for the
// least-favorable contamination construction.
struct DiscretizedLaw {
  Eigen::VectorXd grid;  // strictly increasing
  Eigen::VectorXd mass;  // nonnegative, sums to 1 within 1e-12

  static DiscretizedLaw from_gaussian(double mean, double sd, double lo,
                                      double hi, double step);
  void validate() const;
};

// (1/2) sum |p_i - q_i|; laws must share the grid.
double tv_distance(const DiscretizedLaw& p, const DiscretizedLaw& q);

// sum p_i log(p_i / q_i) with 0 log 0 = 0; +infinity when P puts mass
// where Q has none.
double kl_divergence(const DiscretizedLaw& p, const DiscretizedLaw& q);

// Modulus-of-continuity lower bounds per problem (squared losses).
double modulus_location(double epsilon);                  // 4 eps^2
double modulus_covariance(double epsilon);                // eps^2
double modulus_spca(double epsilon, double lambda);       // min(1, eps^2/lambda^2)

struct LeastFavorablePair {
  double epsilon_prime = 0;  // eps'/(1-eps') = TV(P1, P2)
  DiscretizedLaw q1;         // proportional to (p2 - p1)+
  DiscretizedLaw q2;         // proportional to (p1 - p2)+
  DiscretizedLaw m1;         // (1-eps') P1 + eps' Q1
  DiscretizedLaw m2;         // (1-eps') P2 + eps' Q2; equals m1 pointwise
};

// The constructive indistinguishability argument: mixes P1, P2 with their
// normalized positive parts so that M1 = M2 within roundoff.
LeastFavorablePair least_favorable_pair(const DiscretizedLaw& p1,
                                        const DiscretizedLaw& p2);

enum class Problem {
  Location,
  CovGeneral,
  CovBanded,
  CovBandable,
  CovSparse,
  Spca,
};

std::string problem_name(Problem p);
Problem problem_from_name(const std::string& name);

struct RateParams {
  int k = 0;           // banded half-width
  double alpha = 0;    // bandable decay exponent
  int s = 0;           // sparse rows / spca support
  double lambda = 0;   // spike size
};

// Bare rate expression M(0) v modulus(eps); reference curves only, no
// absolute constants.
double minimax_rate(Problem problem, int n, int p, const RateParams& params,
                    double epsilon);

// ---------------------------------------------------------------------------
// Empirical breakdown.

struct BreakdownEstimator {
  // Fits an estimate (location: p x 1, scatter: p x p).
  std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)> fit;
  // Movement metric between two fits (Euclidean / operator norm).
  std::function<double(const Eigen::MatrixXd&, const Eigen::MatrixXd&)> distance;
};

struct BreakdownConfig {
  double delta = 1.0;        // movement threshold
  int n = 100;
  int trials = 30;
  double exceed_prob = 0.1;  // trigger when P(move > delta) exceeds this
  double eps_step = 0.02;    // grid 0, step, ..., eps_max
  double eps_max = 0.5;
};

struct BreakdownResult {
  bool found = false;    // false: grid exhausted, breakdown above eps_max
  double epsilon = 0.5;  // smallest triggering eps when found
  // exceedance probability per grid value, for diagnostics
  std::vector<double> grid_epsilon;
  std::vector<double> grid_probability;
};

// Paired design: each trial draws one inlier panel; the contaminated copy
// overwrites Bernoulli(eps)-labeled rows with outlier draws.  Returns the
// smallest grid eps whose movement exceedance probability passes the
// threshold; scanning stops there.
BreakdownResult empirical_breakdown(const BreakdownEstimator& estimator,
                                    const InlierLaw& inliers,
                                    const OutlierLaw& outliers,
                                    const BreakdownConfig& config,
                                    std::uint64_t seed);

}  // namespace depthcov

#endif  // DEPTHCOV_THEORY_HPP
