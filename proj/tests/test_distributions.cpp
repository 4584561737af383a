#include <doctest.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "depthcov/common.hpp"
#include "depthcov/depth.hpp"
#include "depthcov/distributions.hpp"
#include "depthcov/linalg.hpp"

using namespace depthcov;

// Calibration reference values computed independently at 30-digit precision
// (root of the squared-marginal CDF at level 1/2) and frozen here.

TEST_CASE("gaussian calibration equals the depth constant") {
  auto fam = calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 3));
  CHECK(fam.beta_cal == doctest::Approx(beta_constant()).epsilon(1e-12));
  // Dimension free.
  auto fam9 = calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 9));
  CHECK(fam9.beta_cal == doctest::Approx(fam.beta_cal).epsilon(1e-12));
}

TEST_CASE("student calibration equals the squared quartile") {
  auto t3 = calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 2, 3));
  CHECK(t3.beta_cal == doctest::Approx(0.58506027405182079).epsilon(1e-12));
  auto t5 = calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 7, 5));
  CHECK(t5.beta_cal == doctest::Approx(0.52807376895261987).epsilon(1e-12));
  // Exact closed form at two dof: qt(3/4, 2)^2 = 2/3.
  auto t2 = calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 3, 2));
  CHECK(t2.beta_cal == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("cauchy calibration is exactly one") {
  auto c = calibrate_canonical(make_elliptical(EllipticalKind::Cauchy, 4));
  CHECK(c.beta_cal == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("laplacian calibration frozen values") {
  auto l1 = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 1));
  // One dimension: the radial part is Exp(1), so the median is (ln 2)^2.
  const double ln2sq = std::log(2.0) * std::log(2.0);
  CHECK(l1.beta_cal == doctest::Approx(ln2sq).epsilon(1e-12));
  auto l2 = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 2));
  CHECK(l2.beta_cal == doctest::Approx(0.88597383405232449).epsilon(1e-11));
  auto l3 = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 3));
  CHECK(l3.beta_cal == doctest::Approx(1.3137588989965835).epsilon(1e-11));
  auto l5 = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 5));
  CHECK(l5.beta_cal == doctest::Approx(2.1961280561591438).epsilon(1e-11));
  auto l20 = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 20));
  CHECK(l20.beta_cal == doctest::Approx(8.9854845698353072).epsilon(1e-9));
}

TEST_CASE("g function is a cdf with median one") {
  for (auto fam : {calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 3)),
                   calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 3, 4)),
                   calibrate_canonical(make_elliptical(EllipticalKind::Cauchy, 3)),
                   calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 3))}) {
    CHECK(g_function(fam, 0.0) == 0.0);
    CHECK(g_function(fam, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    double prev = 0.0;
    for (double t : {0.2, 0.6, 1.0, 1.7, 3.0, 10.0}) {
      const double v = g_function(fam, t);
      CHECK(v >= prev);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
  auto raw = make_elliptical(EllipticalKind::Gaussian, 3);
  CHECK_THROWS_AS(g_function(raw, 1.0), invalid_input);
}

TEST_CASE("covariance factors per family") {
  SymmetricMatrix gamma = SymmetricMatrix::identity(3);

  auto g = calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 3));
  auto cg = covariance_of_elliptical(g, gamma);
  REQUIRE(cg.has_value());
  CHECK((*cg)(0, 0) == doctest::Approx(1.0 / g.beta_cal).epsilon(1e-12));

  auto l = calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 3));
  auto cl = covariance_of_elliptical(l, gamma);
  REQUIRE(cl.has_value());
  CHECK((*cl)(0, 0) == doctest::Approx(4.0 / l.beta_cal).epsilon(1e-10));

  auto t5 = calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 3, 5));
  auto ct = covariance_of_elliptical(t5, gamma);
  REQUIRE(ct.has_value());
  CHECK((*ct)(0, 0) == doctest::Approx((5.0 / 3.0) / t5.beta_cal).epsilon(1e-10));

  // No second moment: no covariance.
  auto t2 = calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 3, 2));
  CHECK_FALSE(covariance_of_elliptical(t2, gamma).has_value());
  auto c = calibrate_canonical(make_elliptical(EllipticalKind::Cauchy, 3));
  CHECK_FALSE(covariance_of_elliptical(c, gamma).has_value());
}

TEST_CASE("sampled elliptical marginals have unit median ratio") {
  // Calibration in action: median of |u'X|^2 / u'Gamma u is one.
  Eigen::MatrixXd g0(2, 2);
  g0 << 2.0, 0.6, 0.6, 1.0;
  SymmetricMatrix gamma(g0);
  Eigen::VectorXd u(2);
  u << 3.0, -1.0;
  const double denom = u.dot(g0 * u);
  for (auto kind : {EllipticalKind::Gaussian, EllipticalKind::StudentT,
                    EllipticalKind::Laplacian, EllipticalKind::Cauchy}) {
    auto fam = calibrate_canonical(make_elliptical(kind, 2, 4));
    auto data = sample_elliptical(fam, gamma, 40000, 99);
    std::vector<double> ratios;
    for (int i = 0; i < data.n(); ++i) {
      const double m = u.dot(data.points.row(i).transpose());
      ratios.push_back(m * m / denom);
    }
    std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2,
                     ratios.end());
    CHECK(ratios[ratios.size() / 2] == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("gaussian sampler matches its covariance") {
  Eigen::MatrixXd s(2, 2);
  s << 1.5, -0.4, -0.4, 0.8;
  auto data = sample_gaussian(SymmetricMatrix(s), 200000, 7);
  const Eigen::MatrixXd emp =
      data.points.transpose() * data.points / double(data.n());
  CHECK((emp - s).cwiseAbs().maxCoeff() < 0.03);
  const Eigen::VectorXd mean = data.points.colwise().mean();
  CHECK(mean.cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("student samples have heavier tails than gaussian") {
  auto fam = calibrate_canonical(make_elliptical(EllipticalKind::Cauchy, 1));
  auto heavy = sample_elliptical(fam, SymmetricMatrix::identity(1), 20000, 5);
  auto light = sample_gaussian(SymmetricMatrix::identity(1), 20000, 5);
  int heavy_tail = 0, light_tail = 0;
  for (int i = 0; i < 20000; ++i) {
    heavy_tail += std::abs(heavy.points(i, 0)) > 10.0;
    light_tail += std::abs(light.points(i, 0)) > 10.0;
  }
  CHECK(heavy_tail > 100);
  CHECK(light_tail == 0);
}

TEST_CASE("samplers are deterministic in the seed") {
  auto a = sample_gaussian(SymmetricMatrix::identity(3), 50, 123);
  auto b = sample_gaussian(SymmetricMatrix::identity(3), 50, 123);
  CHECK((a.points - b.points).cwiseAbs().maxCoeff() == 0.0);
  auto c = sample_gaussian(SymmetricMatrix::identity(3), 50, 124);
  CHECK((a.points - c.points).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("contamination labels mark replaced rows") {
  ContaminationSpec spec;
  spec.epsilon = 1.0;  // degenerate: every row is an outlier
  spec.inlier = gaussian_inliers(SymmetricMatrix::identity(2));
  spec.outlier = point_mass(Eigen::VectorXd::Constant(2, 9.0));
  // epsilon = 1 is outside the model; clamp check happens at sampling.
  spec.epsilon = 0.3;
  auto data = sample_contaminated(spec, 4000, 17);
  REQUIRE(data.has_labels());
  int flagged = 0;
  for (int i = 0; i < data.n(); ++i) {
    if (data.labels[i]) {
      ++flagged;
      CHECK(data.points(i, 0) == 9.0);
      CHECK(data.points(i, 1) == 9.0);
    }
  }
  CHECK(flagged > 0.25 * 4000);
  CHECK(flagged < 0.35 * 4000);

  spec.epsilon = 0.0;
  auto clean = sample_contaminated(spec, 100, 17);
  for (int i = 0; i < clean.n(); ++i) CHECK(clean.labels[i] == 0);
}

TEST_CASE("outlier laws produce the advertised draws") {
  Rng rng(3);
  auto pm = point_mass(Eigen::VectorXd::Constant(3, 2.0));
  CHECK((pm.sample(rng, 3) - Eigen::VectorXd::Constant(3, 2.0)).norm() == 0.0);

  Eigen::VectorXd mu(2);
  mu << 100.0, 0.0;
  auto fg = far_gaussian(mu, SymmetricMatrix::identity(2));
  Eigen::VectorXd draw = fg.sample(rng, 2);
  CHECK(std::abs(draw(0) - 100.0) < 10.0);

  auto ht = heavy_tail(1);
  CHECK(ht.sample(rng, 2).size() == 2);
  CHECK_THROWS_AS(pm.sample(rng, 4), invalid_input);
}

TEST_CASE("regularity holds for the built in families") {
  // Constants chosen inside the families' actual tail and slope margins.
  const double alpha = 0.3, tau = 0.03, kappa = 100.0;
  for (auto fam : {calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 3)),
                   calibrate_canonical(make_elliptical(EllipticalKind::StudentT, 3, 3)),
                   calibrate_canonical(make_elliptical(EllipticalKind::Cauchy, 3)),
                   calibrate_canonical(make_elliptical(EllipticalKind::Laplacian, 3))}) {
    auto rep = check_regularity(fam, alpha, tau, kappa);
    CHECK(rep.pass);
    CHECK(rep.tail_ok);
    CHECK(rep.slope_ok);
  }
}

TEST_CASE("regularity rejects flat and pinched laws") {
  // Nearly flat away from one: the tail condition fails.
  auto flat = [](double t) {
    return 0.5 + 0.001 * std::tanh(t - 1.0);
  };
  auto rep = check_regularity(flat, 0.3, 0.03, 100.0);
  CHECK_FALSE(rep.pass);
  CHECK_FALSE(rep.tail_ok);

  // Locally flat at one: the slope condition fails.
  auto pinched = [](double t) {
    const double d = t - 1.0;
    return 0.5 + 0.2 * d * d * d / (1.0 + std::abs(d * d * d));
  };
  auto rep2 = check_regularity(pinched, 0.3, 0.03, 100.0);
  CHECK_FALSE(rep2.slope_ok);
  CHECK(rep2.witness_t != 0.0);
}

TEST_CASE("regularity rejects invalid thresholds") {
  auto fam = calibrate_canonical(make_elliptical(EllipticalKind::Gaussian, 2));
  CHECK_THROWS_AS(check_regularity(fam, 0.0, 0.1, 10.0), invalid_input);
  CHECK_THROWS_AS(check_regularity(fam, 0.3, -0.1, 10.0), invalid_input);
  CHECK_THROWS_AS(check_regularity(fam, 0.3, 0.1, 0.0), invalid_input);
}

TEST_CASE("psd sqrt squares back") {
  Eigen::MatrixXd s(2, 2);
  s << 2.0, 0.7, 0.7, 1.0;
  Eigen::MatrixXd root = psd_sqrt(SymmetricMatrix(s));
  CHECK((root * root - s).cwiseAbs().maxCoeff() < 1e-12);
  // Negative eigenvalues clamp to zero.
  Eigen::MatrixXd neg(1, 1);
  neg << -4.0;
  CHECK(psd_sqrt(SymmetricMatrix(neg))(0, 0) == 0.0);
}

TEST_CASE("family validation") {
  CHECK_THROWS_AS(make_elliptical(EllipticalKind::StudentT, 3, 0), invalid_input);
  CHECK_THROWS_AS(make_elliptical(EllipticalKind::Gaussian, 0), invalid_input);
  auto c = make_elliptical(EllipticalKind::Cauchy, 2);
  CHECK(c.dof == 1);
}
