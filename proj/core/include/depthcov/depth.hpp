// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_DEPTH_HPP
#define DEPTHCOV_DEPTH_HPP

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <vector>

#include "depthcov/directions.hpp"
#include "depthcov/linalg.hpp"

namespace depthcov {

// The scatter-depth normalizing constant: the unique b > 0 with
// normal_cdf(sqrt(b)) = 3/4; also the median of a chi-squared(1) variable.
// A depth-maximizing scatter under Gaussian data estimates beta * Sigma.
double beta_constant();

struct DepthProfile {
  double value = 0.0;
  int argmin_index = -1;             // row in the direction set
  Eigen::VectorXd argmin_direction;  // minimizing direction
  std::optional<std::vector<double>> per_direction;
};

// Halfspace depth of eta: min over u in U union -U of the fraction of
// samples with u'X_i <= u'eta.  Ties count on both sides, so the value for
// a stored representative u is min(#{proj <= t}, #{proj >= t}) / n.
DepthProfile tukey_depth_empirical(const Eigen::VectorXd& eta,
                                   const Eigen::MatrixXd& data,
                                   const DirectionSet& dirs,
                                   bool keep_profile = false);

// Population halfspace depth of eta under N(theta, I): 1 - Phi(|eta-theta|).
double tukey_depth_gaussian(const Eigen::VectorXd& eta,
                            const Eigen::VectorXd& theta);

// Scatter depth of Gamma: min over u in U of
//   min(#{|u'X_i|^2 <= u'Gamma u}, #{|u'X_i|^2 >= u'Gamma u}) / n.
// Weak inequalities on both sides; Gamma must be PSD within tolerance.
DepthProfile matrix_depth_empirical(const SymmetricMatrix& gamma,
                                    const Eigen::MatrixXd& data,
                                    const DirectionSet& dirs,
                                    bool keep_profile = false);

// Population scatter depth of Gamma under N(0, Sigma): per direction
// r = sqrt(u'Gamma u / u'Sigma u), value min(2 Phi(r) - 1, 2 - 2 Phi(r)).
DepthProfile matrix_depth_gaussian(const SymmetricMatrix& gamma,
                                   const SymmetricMatrix& sigma,
                                   const DirectionSet& dirs,
                                   bool keep_profile = false);

// Population scatter depth under an elliptical law with canonical scatter
// gamma_true and continuous squared-projection CDF G: per direction
// t = u'Gamma u / u'Gamma_true u, value min(G(t), 1 - G(t)).
DepthProfile matrix_depth_elliptical(const SymmetricMatrix& gamma,
                                     const SymmetricMatrix& gamma_true,
                                     const std::function<double(double)>& g,
                                     const DirectionSet& dirs,
                                     bool keep_profile = false);

// Shared engine for scatter-depth optimization.  Sorts |u'X_i|^2 once per
// direction; depths are integer counts (depth = count / n) so comparisons
// and ties are exact.  probe/accept track a current matrix and evaluate
// single-entry perturbations against only the affected directions.
// Not thread-safe; clone per worker.
class MatrixDepthEvaluator {
 public:
  MatrixDepthEvaluator(const Eigen::MatrixXd& data, const DirectionSet& dirs);

  int sample_size() const { return n_; }
  int num_directions() const { return m_; }
  const DirectionSet& directions() const { return dirs_; }

  // Full evaluation of an arbitrary matrix (count scale, no state change).
  // With a positive floor the scan stops once the running minimum drops
  // below it; the returned value is then some count < floor.  Candidates
  // reaching floor or better are always counted exactly.
  int depth_count(const Eigen::MatrixXd& gamma, int floor = 0) const;

  void set_current(const Eigen::MatrixXd& gamma);
  int current_count() const { return cur_count_; }

  // Depth count of current + delta on entry (i, j) (symmetrized).  Returns
  // floor - 1 as soon as the candidate provably cannot reach `floor`.
  int probe_entry(int i, int j, double delta, int floor);

  void accept_entry(int i, int j, double delta);

 private:
  int dir_count(int d, double q) const;
  std::vector<int> affected_dirs(int i, int j) const;

  int n_ = 0;
  int m_ = 0;
  int p_ = 0;
  DirectionSet dirs_;
  std::vector<std::vector<double>> sorted_sq_;  // per direction, ascending
  std::vector<std::vector<int>> touching_;      // dirs with u_i != 0
  std::vector<double> cur_q_;
  std::vector<int> cur_dir_count_;
  int cur_count_ = 0;
  std::vector<int> scratch_count_;
  std::vector<std::uint32_t> scratch_epoch_;
  std::uint32_t epoch_ = 0;
};

// Same engine for halfspace depth: projections sorted per direction, both
// signs of every representative evaluated.
class LocationDepthEvaluator {
 public:
  // smooth interpolates each direction's count tent linearly between
  // adjacent data projections, then takes the minimum over directions.
  // Superlevel sets of the count are slab intersections, so both the count
  // and this relaxation are quasiconcave: the relaxation has no spurious
  // local maxima and gives ascent methods a usable slope on the count's
  // flat steps. At data projections it equals the exact count.
  struct Score {
    int min_count = 0;
    double smooth = 0;
  };

  LocationDepthEvaluator(const Eigen::MatrixXd& data,
                         const DirectionSet& dirs);
  int sample_size() const { return n_; }
  int depth_count(const Eigen::VectorXd& eta) const;
  Score depth_score(const Eigen::VectorXd& eta) const;

 private:
  int n_ = 0;
  int p_ = 0;
  Eigen::MatrixXd dir_rows_;
  std::vector<std::vector<double>> sorted_proj_;
  std::vector<double> span_;  // projection ranges, floor 1, for the tails
};

}  // namespace depthcov

#endif  // DEPTHCOV_DEPTH_HPP
