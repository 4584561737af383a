// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_DISTRIBUTIONS_HPP
#define DEPTHCOV_DISTRIBUTIONS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>

#include "depthcov/common.hpp"
#include "depthcov/dataset.hpp"
#include "depthcov/linalg.hpp"

namespace depthcov {

// Elliptical laws X = xi * A * U with A = Gamma^(1/2) and U uniform on the
// sphere.  A family is *canonical* once the radial law is rescaled so that
// median(|u'X|^2 / u'Gamma u) = 1; beta_cal records the median of the
// unscaled squared marginal, so the calibrated draw is xi0 / sqrt(beta_cal).
enum class EllipticalKind { Gaussian, Laplacian, StudentT, Cauchy };

struct EllipticalFamily {
  EllipticalKind kind = EllipticalKind::Gaussian;
  int dof = 0;          // StudentT degrees of freedom (Cauchy: fixed at 1)
  int dim = 1;          // ambient dimension p (the Laplacian radial law needs it)
  double beta_cal = 0;  // 0 while uncalibrated

  bool calibrated() const { return beta_cal > 0; }
};

EllipticalFamily make_elliptical(EllipticalKind kind, int dim, int dof = 0);

// Determines beta_cal by monotone bisection of the squared-marginal CDF at
// level 1/2 (closed forms for Gaussian/StudentT, quadrature for Laplacian).
// Idempotent: the result depends only on (kind, dof, dim).  The seed is
// accepted for interface stability; the deterministic solvers ignore it.
EllipticalFamily calibrate_canonical(const EllipticalFamily& family,
                                     std::uint64_t seed = 0);

// G(t) = P(|u'X|^2 / u'Gamma u <= t) for the calibrated family; G(1) = 1/2.
double g_function(const EllipticalFamily& family, double t);

// Covariance of the canonical law with scatter Gamma, when it exists:
// Gaussian Gamma/beta_cal, Laplacian (p+1) Gamma/beta_cal, StudentT(d>2)
// d/(d-2) Gamma/beta_cal; nullopt for d <= 2.
std::optional<SymmetricMatrix> covariance_of_elliptical(
    const EllipticalFamily& family, const SymmetricMatrix& gamma);

struct RegularityReport {
  bool pass = false;
  bool tail_ok = false;   // inf_{|t|>=alpha} |G(1)-G(1+t)| >= tau
  bool slope_ok = false;  // inf_{0<|t|<alpha} |G(1)-G(1+t)|/|t| >= 1/sqrt(kappa)
  double witness_t = 0;   // first grid t violating a condition
  double witness_value = 0;
};

RegularityReport check_regularity(const EllipticalFamily& family, double alpha,
                                  double tau, double kappa);
// Same check against an arbitrary CDF-like function t -> G(t), t >= 0.
RegularityReport check_regularity(const std::function<double(double)>& g,
                                  double alpha, double tau, double kappa);

// ---------------------------------------------------------------------------
// Contamination model.

enum class OutlierKind { PointMass, FarGaussian, HeavyTail, Custom };

struct OutlierLaw {
  OutlierKind kind = OutlierKind::PointMass;
  Eigen::VectorXd point;        // PointMass
  Eigen::VectorXd mean;         // FarGaussian
  Eigen::MatrixXd sqrt_cov;     // FarGaussian, symmetric square root
  int dof = 1;                  // HeavyTail (multivariate t, identity scatter)
  std::function<Eigen::VectorXd(Rng&, int)> custom;

  Eigen::VectorXd sample(Rng& rng, int dim) const;
};

OutlierLaw point_mass(const Eigen::VectorXd& z);
OutlierLaw far_gaussian(const Eigen::VectorXd& mean, const SymmetricMatrix& cov);
OutlierLaw heavy_tail(int dof);
OutlierLaw custom_outliers(std::function<Eigen::VectorXd(Rng&, int)> sampler);

struct InlierLaw {
  enum class Kind { Gaussian, Elliptical };
  Kind kind = Kind::Gaussian;
  SymmetricMatrix scatter = SymmetricMatrix::identity(1);  // Sigma or Gamma
  EllipticalFamily family;  // Elliptical only; must be calibrated

  int dim() const { return scatter.dim(); }
};

InlierLaw gaussian_inliers(const SymmetricMatrix& sigma);
InlierLaw elliptical_inliers(const EllipticalFamily& family,
                             const SymmetricMatrix& gamma);

struct ContaminationSpec {
  double epsilon = 0;
  InlierLaw inlier;
  OutlierLaw outlier;
};

// n i.i.d. draws from (1-eps) * inlier + eps * outlier; per-point Bernoulli
// labels are kept in the Dataset (1 = outlier) for diagnostics only.
Dataset sample_contaminated(const ContaminationSpec& spec, int n,
                            std::uint64_t seed);

// n draws X_i = xi_i A U_i from the calibrated family, A = Gamma^(1/2).
Dataset sample_elliptical(const EllipticalFamily& family,
                          const SymmetricMatrix& gamma, int n,
                          std::uint64_t seed);

// n draws from N(0, Sigma) through the symmetric square root.
Dataset sample_gaussian(const SymmetricMatrix& sigma, int n,
                        std::uint64_t seed);

// Symmetric PSD square root (negative eigenvalues clamped to zero).
Eigen::MatrixXd psd_sqrt(const SymmetricMatrix& a);

}  // namespace depthcov

#endif  // DEPTHCOV_DISTRIBUTIONS_HPP
