// SPDX-License-Identifier: Apache-2.0
#include "depthcov/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "depthcov/depth.hpp"
#include "depthcov/special.hpp"

namespace depthcov {

namespace {

struct Quadrature {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Gauss-Legendre nodes by Newton iteration on P_n.
Quadrature gauss_legendre(int n) {
  Quadrature q;
  q.nodes.resize(static_cast<std::size_t>(n));
  q.weights.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    q.nodes[static_cast<std::size_t>(i)] = x;
    q.weights[static_cast<std::size_t>(i)] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return q;
}

const Quadrature& quad96() {
  static const Quadrature q = gauss_legendre(96);
  return q;
}

// CDF of (xi0 * V)^2 for the *unscaled* radial law xi0 of each family, where
// V is the first coordinate of a uniform unit vector.  This is the law of
// |u'X|^2 / u'Gamma u before calibration.
double squared_marginal_cdf(const EllipticalFamily& f, double m) {
  if (m <= 0) return 0;
  switch (f.kind) {
    case EllipticalKind::Gaussian:
      // xi0^2 V^2 ~ chi-squared(1)
      return chi_squared_cdf(1, m);
    case EllipticalKind::StudentT:
    case EllipticalKind::Cauchy: {
      int d = f.kind == EllipticalKind::Cauchy ? 1 : f.dof;
      return 2.0 * student_t_cdf(d, std::sqrt(m)) - 1.0;
    }
    case EllipticalKind::Laplacian: {
      // xi0 ~ Gamma(p, 1), V^2 ~ Beta(1/2, (p-1)/2); integrate the radial
      // CDF over V^2 = sin^2(theta), whose half-circle density is
      // 2 cos^(p-2)(theta) / B(1/2, (p-1)/2).
      int p = f.dim;
      double root = std::sqrt(m);
      if (p == 1) return gamma_p(1.0, root);
      const Quadrature& q = quad96();
      double acc = 0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        double theta = 0.25 * M_PI * (q.nodes[i] + 1.0);
        double s = std::sin(theta);
        double radial = s > 0 ? gamma_p(static_cast<double>(p), root / s) : 1.0;
        acc += q.weights[i] * std::pow(std::cos(theta), p - 2) * radial;
      }
      acc *= 0.25 * M_PI * 2.0;
      double log_beta = std::lgamma(0.5) + std::lgamma(0.5 * (p - 1)) -
                        std::lgamma(0.5 * p);
      return acc / std::exp(log_beta);
    }
  }
  throw numeric_error("unreachable elliptical kind");
}

void validate_family(const EllipticalFamily& f) {
  if (f.dim < 1) throw invalid_input("elliptical family needs dim >= 1");
  if (f.kind == EllipticalKind::StudentT && f.dof < 1)
    throw invalid_input("StudentT needs dof >= 1");
}

double draw_xi0(const EllipticalFamily& f, Rng& rng) {
  switch (f.kind) {
    case EllipticalKind::Gaussian:
      return std::sqrt(rng.chi_squared(static_cast<double>(f.dim)));
    case EllipticalKind::StudentT:
    case EllipticalKind::Cauchy: {
      double d = f.kind == EllipticalKind::Cauchy ? 1.0 : static_cast<double>(f.dof);
      double num = rng.chi_squared(static_cast<double>(f.dim));
      double den = rng.chi_squared(d);
      while (den <= 0) den = rng.chi_squared(d);
      return std::sqrt(num * d / den);
    }
    case EllipticalKind::Laplacian:
      return rng.gamma(static_cast<double>(f.dim));
  }
  throw numeric_error("unreachable elliptical kind");
}

Eigen::VectorXd draw_sphere(Rng& rng, int dim) {
  Eigen::VectorXd u(dim);
  double norm = 0;
  do {
    for (int j = 0; j < dim; ++j) u[j] = rng.normal();
    norm = u.norm();
  } while (norm < 1e-150);
  return u / norm;
}

}  // namespace

EllipticalFamily make_elliptical(EllipticalKind kind, int dim, int dof) {
  EllipticalFamily f;
  f.kind = kind;
  f.dim = dim;
  f.dof = kind == EllipticalKind::Cauchy ? 1 : dof;
  validate_family(f);
  return f;
}

EllipticalFamily calibrate_canonical(const EllipticalFamily& family,
                                     std::uint64_t seed) {
  (void)seed;
  validate_family(family);
  // Monotone bisection of the squared-marginal CDF at level 1/2.
  double lo = 0, hi = 1;
  int guard = 0;
  while (squared_marginal_cdf(family, hi) < 0.5) {
    lo = hi;
    hi *= 2;
    if (++guard > 200) throw numeric_error("calibration bracket not found");
  }
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if (squared_marginal_cdf(family, mid) < 0.5)
      lo = mid;
    else
      hi = mid;
  }
  EllipticalFamily out = family;
  out.beta_cal = 0.5 * (lo + hi);
  return out;
}

double g_function(const EllipticalFamily& family, double t) {
  validate_family(family);
  if (!family.calibrated()) throw invalid_input("family is not calibrated");
  if (t < 0) throw invalid_input("g_function needs t >= 0");
  if (family.kind == EllipticalKind::Gaussian)
    return 2.0 * normal_cdf(std::sqrt(family.beta_cal * t)) - 1.0;
  return squared_marginal_cdf(family, t * family.beta_cal);
}

std::optional<SymmetricMatrix> covariance_of_elliptical(
    const EllipticalFamily& family, const SymmetricMatrix& gamma) {
  validate_family(family);
  if (!family.calibrated()) throw invalid_input("family is not calibrated");
  if (gamma.dim() != family.dim)
    throw invalid_input("scatter dimension does not match family");
  double factor = 0;
  switch (family.kind) {
    case EllipticalKind::Gaussian:
      factor = 1.0;
      break;
    case EllipticalKind::Laplacian:
      factor = static_cast<double>(family.dim + 1);
      break;
    case EllipticalKind::StudentT:
      if (family.dof <= 2) return std::nullopt;
      factor = static_cast<double>(family.dof) / (family.dof - 2);
      break;
    case EllipticalKind::Cauchy:
      return std::nullopt;
  }
  return SymmetricMatrix(gamma.matrix() * (factor / family.beta_cal));
}

RegularityReport check_regularity(const std::function<double(double)>& g,
                                  double alpha, double tau, double kappa) {
  if (!(alpha > 0) || !(tau > 0) || !(kappa > 0))
    throw invalid_input("regularity parameters must be positive");
  auto g_at = [&](double t) { return t <= 0 ? 0.0 : g(t); };
  const double g1 = g_at(1.0);

  RegularityReport rep;
  rep.tail_ok = true;
  rep.slope_ok = true;

  // Tail: |t| >= alpha, probed out to a wide multiple (G is monotone for
  // genuine CDFs, so the binding point sits at |t| = alpha).
  const int tail_pts = 64;
  for (int side = 0; side < 2 && rep.tail_ok; ++side) {
    double sign = side == 0 ? 1.0 : -1.0;
    for (int i = 0; i < tail_pts; ++i) {
      double t = sign * alpha *
                 std::pow(100.0, static_cast<double>(i) / (tail_pts - 1));
      double gap = std::abs(g1 - g_at(1.0 + t));
      if (gap < tau) {
        rep.tail_ok = false;
        rep.witness_t = t;
        rep.witness_value = gap;
        break;
      }
    }
  }

  // Local slope: 0 < |t| < alpha.
  const int slope_pts = 64;
  const double floor_ratio = 1.0 / std::sqrt(kappa);
  for (int side = 0; side < 2 && rep.slope_ok; ++side) {
    double sign = side == 0 ? 1.0 : -1.0;
    for (int i = 1; i <= slope_pts; ++i) {
      double t = sign * alpha * static_cast<double>(i) / (slope_pts + 1);
      double ratio = std::abs(g1 - g_at(1.0 + t)) / std::abs(t);
      if (ratio < floor_ratio) {
        rep.slope_ok = false;
        if (rep.tail_ok) {
          rep.witness_t = t;
          rep.witness_value = ratio;
        }
        break;
      }
    }
  }
  rep.pass = rep.tail_ok && rep.slope_ok;
  return rep;
}

RegularityReport check_regularity(const EllipticalFamily& family, double alpha,
                                  double tau, double kappa) {
  validate_family(family);
  if (!family.calibrated()) throw invalid_input("family is not calibrated");
  return check_regularity(
      [&](double t) { return g_function(family, t); }, alpha, tau, kappa);
}

// ---------------------------------------------------------------------------
// Outlier laws.

Eigen::VectorXd OutlierLaw::sample(Rng& rng, int dim) const {
  switch (kind) {
    case OutlierKind::PointMass:
      if (point.size() != dim) throw invalid_input("point mass dimension mismatch");
      return point;
    case OutlierKind::FarGaussian: {
      if (mean.size() != dim) throw invalid_input("outlier mean dimension mismatch");
      Eigen::VectorXd z(dim);
      for (int j = 0; j < dim; ++j) z[j] = rng.normal();
      return mean + sqrt_cov * z;
    }
    case OutlierKind::HeavyTail: {
      Eigen::VectorXd z(dim);
      for (int j = 0; j < dim; ++j) z[j] = rng.normal();
      double den = rng.chi_squared(static_cast<double>(dof));
      while (den <= 0) den = rng.chi_squared(static_cast<double>(dof));
      return z * std::sqrt(static_cast<double>(dof) / den);
    }
    case OutlierKind::Custom:
      if (!custom) throw invalid_input("custom outlier law has no sampler");
      return custom(rng, dim);
  }
  throw numeric_error("unreachable outlier kind");
}

OutlierLaw point_mass(const Eigen::VectorXd& z) {
  if (z.size() == 0 || !z.allFinite()) throw invalid_input("invalid point mass");
  OutlierLaw law;
  law.kind = OutlierKind::PointMass;
  law.point = z;
  return law;
}

OutlierLaw far_gaussian(const Eigen::VectorXd& mean, const SymmetricMatrix& cov) {
  if (mean.size() != cov.dim()) throw invalid_input("outlier mean/cov mismatch");
  OutlierLaw law;
  law.kind = OutlierKind::FarGaussian;
  law.mean = mean;
  law.sqrt_cov = psd_sqrt(cov);
  return law;
}

OutlierLaw heavy_tail(int dof) {
  if (dof < 1) throw invalid_input("heavy tail needs dof >= 1");
  OutlierLaw law;
  law.kind = OutlierKind::HeavyTail;
  law.dof = dof;
  return law;
}

OutlierLaw custom_outliers(std::function<Eigen::VectorXd(Rng&, int)> sampler) {
  if (!sampler) throw invalid_input("null custom sampler");
  OutlierLaw law;
  law.kind = OutlierKind::Custom;
  law.custom = std::move(sampler);
  return law;
}

InlierLaw gaussian_inliers(const SymmetricMatrix& sigma) {
  if (!sigma.is_psd()) throw invalid_input("inlier covariance must be PSD");
  InlierLaw law;
  law.kind = InlierLaw::Kind::Gaussian;
  law.scatter = sigma;
  return law;
}

InlierLaw elliptical_inliers(const EllipticalFamily& family,
                             const SymmetricMatrix& gamma) {
  validate_family(family);
  if (!family.calibrated()) throw invalid_input("family is not calibrated");
  if (gamma.dim() != family.dim)
    throw invalid_input("scatter dimension does not match family");
  if (!gamma.is_psd()) throw invalid_input("scatter must be PSD");
  InlierLaw law;
  law.kind = InlierLaw::Kind::Elliptical;
  law.scatter = gamma;
  law.family = family;
  return law;
}

Eigen::MatrixXd psd_sqrt(const SymmetricMatrix& a) {
  SpectralDecomposition sd = eigh(a);
  Eigen::VectorXd root = sd.eigenvalues.cwiseMax(0.0).cwiseSqrt();
  return sd.eigenvectors * root.asDiagonal() * sd.eigenvectors.transpose();
}

Dataset sample_gaussian(const SymmetricMatrix& sigma, int n,
                        std::uint64_t seed) {
  if (n < 1) throw invalid_input("sample size must be >= 1");
  if (!sigma.is_psd()) throw invalid_input("covariance must be PSD");
  const int p = sigma.dim();
  Eigen::MatrixXd a = psd_sqrt(sigma);
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) z[j] = rng.normal();
    x.row(i) = (a * z).transpose();
  }
  return Dataset{std::move(x), {}};
}

Dataset sample_elliptical(const EllipticalFamily& family,
                          const SymmetricMatrix& gamma, int n,
                          std::uint64_t seed) {
  validate_family(family);
  if (!family.calibrated()) throw invalid_input("family is not calibrated");
  if (n < 1) throw invalid_input("sample size must be >= 1");
  if (gamma.dim() != family.dim)
    throw invalid_input("scatter dimension does not match family");
  if (!gamma.is_psd()) throw invalid_input("scatter must be PSD");
  const int p = gamma.dim();
  Eigen::MatrixXd a = psd_sqrt(gamma);
  const double scale = 1.0 / std::sqrt(family.beta_cal);
  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd u = draw_sphere(rng, p);
    double xi = draw_xi0(family, rng) * scale;
    x.row(i) = (xi * (a * u)).transpose();
  }
  return Dataset{std::move(x), {}};
}

Dataset sample_contaminated(const ContaminationSpec& spec, int n,
                            std::uint64_t seed) {
  if (n < 1) throw invalid_input("sample size must be >= 1");
  if (spec.epsilon < 0 || spec.epsilon > 1)
    throw invalid_input("epsilon must lie in [0, 1]");
  const int p = spec.inlier.dim();
  Eigen::MatrixXd a;
  double xi_scale = 1.0;
  if (spec.inlier.kind == InlierLaw::Kind::Gaussian) {
    if (!spec.inlier.scatter.is_psd())
      throw invalid_input("inlier covariance must be PSD");
    a = psd_sqrt(spec.inlier.scatter);
  } else {
    validate_family(spec.inlier.family);
    if (!spec.inlier.family.calibrated())
      throw invalid_input("family is not calibrated");
    if (spec.inlier.family.dim != p)
      throw invalid_input("scatter dimension does not match family");
    a = psd_sqrt(spec.inlier.scatter);
    xi_scale = 1.0 / std::sqrt(spec.inlier.family.beta_cal);
  }

  Rng rng(seed);
  Eigen::MatrixXd x(n, p);
  std::vector<std::uint8_t> labels(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    bool outlier = rng.uniform01() <= spec.epsilon;
    labels[static_cast<std::size_t>(i)] = outlier ? 1 : 0;
    if (outlier) {
      x.row(i) = spec.outlier.sample(rng, p).transpose();
    } else if (spec.inlier.kind == InlierLaw::Kind::Gaussian) {
      for (int j = 0; j < p; ++j) z[j] = rng.normal();
      x.row(i) = (a * z).transpose();
    } else {
      Eigen::VectorXd u = draw_sphere(rng, p);
      double xi = draw_xi0(spec.inlier.family, rng) * xi_scale;
      x.row(i) = (xi * (a * u)).transpose();
    }
  }
  return Dataset{std::move(x), std::move(labels)};
}

}  // namespace depthcov
