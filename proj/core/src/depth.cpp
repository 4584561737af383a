// SPDX-License-Identifier: Apache-2.0
#include "depthcov/depth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "depthcov/common.hpp"
#include "depthcov/special.hpp"

namespace depthcov {

double beta_constant() {
  static const double value = [] {
    double lo = 0.2;
    double hi = 0.8;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (normal_cdf(std::sqrt(mid)) < 0.75) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo < 1e-16) break;
    }
    return 0.5 * (lo + hi);
  }();
  return value;
}

namespace {

void check_depth_args(int data_p, int n, const DirectionSet& dirs) {
  if (n < 1) throw invalid_input("depth: need at least one sample");
  if (dirs.count() < 1) throw invalid_input("depth: empty direction set");
  if (dirs.dim != data_p) {
    throw invalid_input("depth: direction/data dimension mismatch");
  }
}

DepthProfile finish_profile(int n, int argmin, int best,
                            const DirectionSet& dirs,
                            std::vector<double>* per_dir) {
  DepthProfile out;
  out.value = static_cast<double>(best) / n;
  out.argmin_index = argmin;
  out.argmin_direction = dirs.dirs.row(argmin);
  if (per_dir) out.per_direction = std::move(*per_dir);
  return out;
}

}  // namespace

DepthProfile tukey_depth_empirical(const Eigen::VectorXd& eta,
                                   const Eigen::MatrixXd& data,
                                   const DirectionSet& dirs,
                                   bool keep_profile) {
  const int n = static_cast<int>(data.rows());
  check_depth_args(static_cast<int>(data.cols()), n, dirs);
  if (eta.size() != data.cols()) {
    throw invalid_input("tukey_depth_empirical: eta dimension mismatch");
  }
  std::vector<double> per_dir;
  if (keep_profile) per_dir.resize(dirs.count());
  int best = n + 1;
  int argmin = 0;
  const Eigen::VectorXd proj_eta = dirs.dirs * eta;
  for (int d = 0; d < dirs.count(); ++d) {
    const double t = proj_eta(d);
    int le = 0;
    int ge = 0;
    for (int i = 0; i < n; ++i) {
      const double v = dirs.dirs.row(d).dot(data.row(i));
      le += v <= t;
      ge += v >= t;
    }
    const int c = std::min(le, ge);
    if (keep_profile) per_dir[d] = static_cast<double>(c) / n;
    if (c < best) {
      best = c;
      argmin = d;
    }
  }
  return finish_profile(n, argmin, best, dirs,
                        keep_profile ? &per_dir : nullptr);
}

double tukey_depth_gaussian(const Eigen::VectorXd& eta,
                            const Eigen::VectorXd& theta) {
  if (eta.size() != theta.size()) {
    throw invalid_input("tukey_depth_gaussian: dimension mismatch");
  }
  return 1.0 - normal_cdf((eta - theta).norm());
}

DepthProfile matrix_depth_empirical(const SymmetricMatrix& gamma,
                                    const Eigen::MatrixXd& data,
                                    const DirectionSet& dirs,
                                    bool keep_profile) {
  const int n = static_cast<int>(data.rows());
  check_depth_args(static_cast<int>(data.cols()), n, dirs);
  if (gamma.dim() != data.cols()) {
    throw invalid_input("matrix_depth_empirical: gamma dimension mismatch");
  }
  if (!gamma.is_psd()) {
    throw invalid_input("matrix_depth_empirical: gamma must be PSD");
  }
  std::vector<double> per_dir;
  if (keep_profile) per_dir.resize(dirs.count());
  int best = n + 1;
  int argmin = 0;
  for (int d = 0; d < dirs.count(); ++d) {
    const Eigen::VectorXd u = dirs.dirs.row(d);
    const double q = u.dot(gamma.matrix() * u);
    int le = 0;
    int ge = 0;
    for (int i = 0; i < n; ++i) {
      const double v = u.dot(data.row(i));
      const double sq = v * v;
      le += sq <= q;
      ge += sq >= q;
    }
    const int c = std::min(le, ge);
    if (keep_profile) per_dir[d] = static_cast<double>(c) / n;
    if (c < best) {
      best = c;
      argmin = d;
    }
  }
  return finish_profile(n, argmin, best, dirs,
                        keep_profile ? &per_dir : nullptr);
}

DepthProfile matrix_depth_gaussian(const SymmetricMatrix& gamma,
                                   const SymmetricMatrix& sigma,
                                   const DirectionSet& dirs,
                                   bool keep_profile) {
  check_depth_args(gamma.dim(), 1, dirs);
  if (sigma.dim() != gamma.dim()) {
    throw invalid_input("matrix_depth_gaussian: dimension mismatch");
  }
  std::vector<double> per_dir;
  if (keep_profile) per_dir.resize(dirs.count());
  double best = 2.0;
  int argmin = 0;
  for (int d = 0; d < dirs.count(); ++d) {
    const Eigen::VectorXd u = dirs.dirs.row(d);
    const double num = u.dot(gamma.matrix() * u);
    const double den = u.dot(sigma.matrix() * u);
    if (den <= 0.0) {
      throw invalid_input("matrix_depth_gaussian: sigma not positive on net");
    }
    const double r = std::sqrt(std::max(0.0, num / den));
    const double cdf = normal_cdf(r);
    const double v = std::min(2.0 * cdf - 1.0, 2.0 - 2.0 * cdf);
    if (keep_profile) per_dir[d] = v;
    if (v < best) {
      best = v;
      argmin = d;
    }
  }
  DepthProfile out;
  out.value = best;
  out.argmin_index = argmin;
  out.argmin_direction = dirs.dirs.row(argmin);
  if (keep_profile) out.per_direction = std::move(per_dir);
  return out;
}

DepthProfile matrix_depth_elliptical(const SymmetricMatrix& gamma,
                                     const SymmetricMatrix& gamma_true,
                                     const std::function<double(double)>& g,
                                     const DirectionSet& dirs,
                                     bool keep_profile) {
  check_depth_args(gamma.dim(), 1, dirs);
  if (gamma_true.dim() != gamma.dim()) {
    throw invalid_input("matrix_depth_elliptical: dimension mismatch");
  }
  std::vector<double> per_dir;
  if (keep_profile) per_dir.resize(dirs.count());
  double best = 2.0;
  int argmin = 0;
  for (int d = 0; d < dirs.count(); ++d) {
    const Eigen::VectorXd u = dirs.dirs.row(d);
    const double num = u.dot(gamma.matrix() * u);
    const double den = u.dot(gamma_true.matrix() * u);
    if (den <= 0.0) {
      throw invalid_input(
          "matrix_depth_elliptical: gamma_true not positive on net");
    }
    const double t = num / den;
    const double cdf = g(t);
    if (!(cdf >= -1e-9 && cdf <= 1.0 + 1e-9)) {
      throw invalid_input("matrix_depth_elliptical: G is not a CDF");
    }
    const double v = std::min(cdf, 1.0 - cdf);
    if (keep_profile) per_dir[d] = v;
    if (v < best) {
      best = v;
      argmin = d;
    }
  }
  DepthProfile out;
  out.value = best;
  out.argmin_index = argmin;
  out.argmin_direction = dirs.dirs.row(argmin);
  if (keep_profile) out.per_direction = std::move(per_dir);
  return out;
}

MatrixDepthEvaluator::MatrixDepthEvaluator(const Eigen::MatrixXd& data,
                                           const DirectionSet& dirs)
    : n_(static_cast<int>(data.rows())),
      m_(dirs.count()),
      p_(static_cast<int>(data.cols())),
      dirs_(dirs) {
  check_depth_args(p_, n_, dirs);
  sorted_sq_.resize(m_);
  touching_.resize(p_);
  const Eigen::MatrixXd proj = data * dirs.dirs.transpose();  // n x m
  for (int d = 0; d < m_; ++d) {
    auto& v = sorted_sq_[d];
    v.resize(n_);
    for (int i = 0; i < n_; ++i) {
      const double x = proj(i, d);
      v[i] = x * x;
    }
    std::sort(v.begin(), v.end());
    for (int j = 0; j < p_; ++j) {
      if (dirs.dirs(d, j) != 0.0) touching_[j].push_back(d);
    }
  }
  scratch_count_.assign(m_, 0);
  scratch_epoch_.assign(m_, 0);
  cur_q_.assign(m_, 0.0);
  cur_dir_count_.assign(m_, 0);
}

int MatrixDepthEvaluator::dir_count(int d, double q) const {
  const auto& v = sorted_sq_[d];
  const int le = static_cast<int>(
      std::upper_bound(v.begin(), v.end(), q) - v.begin());
  const int ge = n_ - static_cast<int>(
      std::lower_bound(v.begin(), v.end(), q) - v.begin());
  return std::min(le, ge);
}

int MatrixDepthEvaluator::depth_count(const Eigen::MatrixXd& gamma,
                                      int floor) const {
  int best = n_ + 1;
  for (int d = 0; d < m_; ++d) {
    const Eigen::VectorXd u = dirs_.dirs.row(d);
    const int c = dir_count(d, u.dot(gamma * u));
    if (c < best) {
      best = c;
      if (best < floor) return best;
    }
  }
  return best;
}

void MatrixDepthEvaluator::set_current(const Eigen::MatrixXd& gamma) {
  cur_count_ = n_ + 1;
  for (int d = 0; d < m_; ++d) {
    const Eigen::VectorXd u = dirs_.dirs.row(d);
    cur_q_[d] = u.dot(gamma * u);
    cur_dir_count_[d] = dir_count(d, cur_q_[d]);
    cur_count_ = std::min(cur_count_, cur_dir_count_[d]);
  }
}

std::vector<int> MatrixDepthEvaluator::affected_dirs(int i, int j) const {
  std::vector<int> out;
  if (i == j) {
    out = touching_[i];
  } else {
    for (int d : touching_[i]) {
      if (dirs_.dirs(d, j) != 0.0) out.push_back(d);
    }
  }
  return out;
}

int MatrixDepthEvaluator::probe_entry(int i, int j, double delta, int floor) {
  ++epoch_;
  int running = n_ + 1;
  for (int d : touching_[i]) {
    double dq;
    if (i == j) {
      const double ui = dirs_.dirs(d, i);
      dq = delta * ui * ui;
    } else {
      const double uj = dirs_.dirs(d, j);
      if (uj == 0.0) continue;
      dq = 2.0 * delta * dirs_.dirs(d, i) * uj;
    }
    const int c = dir_count(d, cur_q_[d] + dq);
    scratch_count_[d] = c;
    scratch_epoch_[d] = epoch_;
    if (c < running) {
      running = c;
      if (running < floor) return floor - 1;
    }
  }
  for (int d = 0; d < m_; ++d) {
    const int c =
        scratch_epoch_[d] == epoch_ ? scratch_count_[d] : cur_dir_count_[d];
    if (c < running) {
      running = c;
      if (running < floor) return floor - 1;
    }
  }
  return running;
}

void MatrixDepthEvaluator::accept_entry(int i, int j, double delta) {
  for (int d : touching_[i]) {
    double dq;
    if (i == j) {
      const double ui = dirs_.dirs(d, i);
      dq = delta * ui * ui;
    } else {
      const double uj = dirs_.dirs(d, j);
      if (uj == 0.0) continue;
      dq = 2.0 * delta * dirs_.dirs(d, i) * uj;
    }
    cur_q_[d] += dq;
    cur_dir_count_[d] = dir_count(d, cur_q_[d]);
  }
  cur_count_ = n_ + 1;
  for (int d = 0; d < m_; ++d) {
    cur_count_ = std::min(cur_count_, cur_dir_count_[d]);
  }
}

LocationDepthEvaluator::LocationDepthEvaluator(const Eigen::MatrixXd& data,
                                               const DirectionSet& dirs)
    : n_(static_cast<int>(data.rows())),
      p_(static_cast<int>(data.cols())),
      dir_rows_(dirs.dirs) {
  check_depth_args(p_, n_, dirs);
  const int m = dirs.count();
  sorted_proj_.resize(m);
  span_.resize(m);
  const Eigen::MatrixXd proj = data * dir_rows_.transpose();
  for (int d = 0; d < m; ++d) {
    auto& v = sorted_proj_[d];
    v.resize(n_);
    for (int i = 0; i < n_; ++i) v[i] = proj(i, d);
    std::sort(v.begin(), v.end());
    const double span = v.back() - v.front();
    span_[d] = span > 0 ? span : 1.0;
  }
}

int LocationDepthEvaluator::depth_count(const Eigen::VectorXd& eta) const {
  return depth_score(eta).min_count;
}

LocationDepthEvaluator::Score LocationDepthEvaluator::depth_score(
    const Eigen::VectorXd& eta) const {
  if (eta.size() != p_) {
    throw invalid_input("LocationDepthEvaluator: eta dimension mismatch");
  }
  Score score;
  score.min_count = n_ + 1;
  score.smooth = std::numeric_limits<double>::infinity();
  const Eigen::VectorXd t = dir_rows_ * eta;
  for (std::size_t d = 0; d < sorted_proj_.size(); ++d) {
    const auto& v = sorted_proj_[d];
    const double td = t(static_cast<Eigen::Index>(d));
    const auto lo_it = std::lower_bound(v.begin(), v.end(), td);
    const auto up_it = std::upper_bound(lo_it, v.end(), td);
    const int lo = static_cast<int>(lo_it - v.begin());
    const int up = static_cast<int>(up_it - v.begin());
    const int c = std::min(up, n_ - lo);
    if (c < score.min_count) score.min_count = c;
    double s;
    if (lo < up) {
      s = c;
    } else if (lo == 0) {
      s = (td - v.front()) / span_[d];
    } else if (lo == n_) {
      s = (v.back() - td) / span_[d];
    } else {
      const double a = v[static_cast<std::size_t>(lo - 1)];
      const double b = v[static_cast<std::size_t>(lo)];
      const int la = static_cast<int>(
          std::lower_bound(v.begin(), lo_it, a) - v.begin());
      const int ub = static_cast<int>(
          std::upper_bound(lo_it, v.end(), b) - v.begin());
      const double ga = std::min(lo, n_ - la);
      const double gb = std::min(ub, n_ - lo);
      s = ga + (gb - ga) * (td - a) / (b - a);
    }
    if (s < score.smooth) score.smooth = s;
  }
  return score;
}

}  // namespace depthcov
