// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_ESTIMATORS_HPP
#define DEPTHCOV_ESTIMATORS_HPP

#include <Eigen/Dense>
#include <vector>

#include "depthcov/depth.hpp"
#include "depthcov/directions.hpp"
#include "depthcov/linalg.hpp"

namespace depthcov {

struct OptimizerConfig {
  // Scatter ascent: step starts at init_step_rel times the mean seed
  // diagonal, shrinks by `shrink` after a sweep with no accepted move, and
  // the search stops below min_step or after max_sweeps sweeps.
  double init_step_rel = 0.1;
  double shrink = 0.5;
  double min_step = 1e-5;
  int max_sweeps = 200;
  // Location simplex: per-run evaluation budget scales with dimension, and
  // the search restarts (shrunken) around the incumbent `restarts` times.
  int restarts = 2;
  int max_evals_per_dim = 400;
};

enum class StructureKind { General, Banded, Sparse };

struct StructureClass {
  StructureKind kind = StructureKind::General;
  int k = 0;  // band half-width (Banded)
  int s = 0;  // nonzero off-diagonal rows (Sparse)
  // Optional operator-norm bound on the Sigma-scale search box; candidates
  // with |Gamma_ij| > spectral_bound * beta are rejected.  0 disables.
  double spectral_bound = 0.0;

  static StructureClass general() { return {}; }
  static StructureClass banded(int k) {
    StructureClass c;
    c.kind = StructureKind::Banded;
    c.k = k;
    return c;
  }
  static StructureClass sparse(int s) {
    StructureClass c;
    c.kind = StructureKind::Sparse;
    c.s = s;
    return c;
  }
};

struct EstimatorReport {
  SymmetricMatrix estimate;    // depth-maximizing Gamma (beta * Sigma scale)
  double achieved_depth = 0.0;  // recomputed from the returned estimate
  double seed_depth = 0.0;
  int sweeps = 0;
  bool converged = false;
  std::vector<int> support;    // Sparse class: selected rows, ascending
  bool support_exhaustive = false;
};

struct LocationReport {
  Eigen::VectorXd estimate;
  double achieved_depth = 0.0;
  double seed_depth = 0.0;
  int evaluations = 0;
};

// Columnwise median; even counts use the midpoint of the two middle values.
Eigen::VectorXd coordinate_median(const Eigen::MatrixXd& data);

// Maximizes halfspace depth over U union -U by a simplex search seeded at
// the coordinate median; ties at equal depth resolve toward the seed.
LocationReport tukey_median(const Eigen::MatrixXd& data,
                            const DirectionSet& dirs,
                            const OptimizerConfig& config = {});

// Entrywise robust scatter start on the beta * Sigma scale: diagonal from
// medians of squares, off-diagonals by the polarization identity
//   Gamma_ij = (med((X_i+X_j)^2/2) - med((X_i-X_j)^2/2)) / 2.
// Not floored; callers project/floor as needed.
SymmetricMatrix median_fit_seed(const Eigen::MatrixXd& data);

// Depth-maximizing scatter over the structure class: median seed, then
// structural projection + PSD floor, then coordinate ascent on the free
// entries.  Moves are accepted on strict depth improvement, or at equal
// depth when they strictly reduce the Frobenius distance to the seed.
EstimatorReport deepest_covariance(const Eigen::MatrixXd& data,
                                   const DirectionSet& dirs,
                                   const StructureClass& cls = {},
                                   const OptimizerConfig& config = {});

// Gamma-scale to Sigma-scale: divides by beta_constant().
SymmetricMatrix scale_to_sigma(const SymmetricMatrix& gamma);

// Bandwidth k = ceil(n^(1/(2 alpha + 1))) for the decay-class sweep.
int bandable_bandwidth(int n, double alpha);

struct SparsePcaResult {
  Eigen::MatrixXd projector;  // p x p rank-r projector V V'
  Eigen::MatrixXd basis;      // p x r, leading eigenvectors
  bool small_gap = false;     // eigengap below 1e-12 at the cut
};

// Principal subspace of a (sparse-class) scatter estimate.
SparsePcaResult sparse_pca(const SymmetricMatrix& gamma, int r);

// Squared Frobenius distance of two orthogonal projectors.
double subspace_loss(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2);

// Second-moment matrix (1/n) sum x_i x_i'; no centering.
SymmetricMatrix sample_covariance(const Eigen::MatrixXd& data);

}  // namespace depthcov

#endif  // DEPTHCOV_ESTIMATORS_HPP
