// SPDX-License-Identifier: Apache-2.0
#include "depthcov/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <utility>

#include "depthcov/common.hpp"

namespace depthcov {

namespace {

double median_inplace(std::vector<double>& v) {
  if (v.empty()) throw invalid_input("median of empty range");
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double hi = v[mid];
  if (n % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

void check_data(const Eigen::MatrixXd& data) {
  if (data.rows() < 1 || data.cols() < 1) throw invalid_input("empty data matrix");
  if (!data.allFinite()) throw invalid_input("data contains non-finite values");
}

}  // namespace

Eigen::VectorXd coordinate_median(const Eigen::MatrixXd& data) {
  check_data(data);
  const Eigen::Index p = data.cols();
  Eigen::VectorXd med(p);
  std::vector<double> col(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index j = 0; j < p; ++j) {
    Eigen::VectorXd::Map(col.data(), data.rows()) = data.col(j);
    med[j] = median_inplace(col);
  }
  return med;
}

SymmetricMatrix median_fit_seed(const Eigen::MatrixXd& data) {
  check_data(data);
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(p, p);
  std::vector<double> work(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < p; ++i) {
    Eigen::VectorXd::Map(work.data(), n) = data.col(i).array().square();
    g(i, i) = median_inplace(work);
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = i + 1; j < p; ++j) {
      Eigen::VectorXd::Map(work.data(), n) =
          0.5 * (data.col(i) + data.col(j)).array().square();
      double mplus = median_inplace(work);
      Eigen::VectorXd::Map(work.data(), n) =
          0.5 * (data.col(i) - data.col(j)).array().square();
      double mminus = median_inplace(work);
      g(i, j) = g(j, i) = 0.5 * (mplus - mminus);
    }
  }
  return SymmetricMatrix(g);
}

// ---------------------------------------------------------------------------
// Location: simplex ascent steered by the interpolated depth, reported by
// the exact count.

namespace {

struct LocScore {
  int count;
  double smooth;
  double dist2;
};

// Internal simplex ordering. The interpolated depth is continuous and
// quasiconcave and sits within one count step of the exact value, so it
// orders plateau points without introducing false optima; the seed
// distance settles exact ties.
bool loc_better(const LocScore& a, const LocScore& b) {
  if (a.smooth != b.smooth) return a.smooth > b.smooth;
  return a.dist2 < b.dist2;
}

// Reported maximizer: ties at equal depth resolve toward the seed.
bool loc_report_better(const LocScore& a, const LocScore& b) {
  if (a.count != b.count) return a.count > b.count;
  return a.dist2 < b.dist2;
}

}  // namespace

LocationReport tukey_median(const Eigen::MatrixXd& data,
                            const DirectionSet& dirs,
                            const OptimizerConfig& config) {
  check_data(data);
  const Eigen::Index n = data.rows();
  const Eigen::Index p = data.cols();
  if (dirs.dim != static_cast<int>(p))
    throw invalid_input("direction set dimension does not match data");
  if (dirs.count() == 0) throw invalid_input("empty direction set");

  LocationDepthEvaluator eval(data, dirs);
  const Eigen::VectorXd seed = coordinate_median(data);

  auto score = [&](const Eigen::VectorXd& eta) -> LocScore {
    const auto s = eval.depth_score(eta);
    return {s.min_count, s.smooth, (eta - seed).squaredNorm()};
  };

  // Per-coordinate MAD sets the initial simplex radius.
  Eigen::VectorXd radius(p);
  {
    std::vector<double> work(static_cast<std::size_t>(n));
    for (Eigen::Index j = 0; j < p; ++j) {
      Eigen::VectorXd::Map(work.data(), n) = (data.col(j).array() - seed[j]).abs();
      double mad = median_inplace(work);
      if (!(mad > 0)) {
        double span = data.col(j).maxCoeff() - data.col(j).minCoeff();
        mad = span > 0 ? 0.25 * span : 1.0;
      }
      radius[j] = mad;
    }
  }

  Eigen::VectorXd best = seed;
  LocScore best_score = score(best);
  int evals = 1;
  const int budget = std::max(200, config.max_evals_per_dim * static_cast<int>(p));

  // Dimension-adaptive simplex coefficients; at p = 2 they reduce to the
  // classic 1 / 2 / 0.5 / 0.5 set, in high dimension they shrink gently
  // enough that the simplex keeps its reach.
  const double pp = std::max<double>(2.0, static_cast<double>(p));
  const double expand_c = 1.0 + 2.0 / pp;
  const double contract_c = 0.75 - 0.5 / pp;
  const double shrink_c = 1.0 - 1.0 / pp;

  const int nverts = static_cast<int>(p) + 1;
  std::vector<Eigen::VectorXd> vert(static_cast<std::size_t>(nverts));
  std::vector<LocScore> vsc(static_cast<std::size_t>(nverts));

  // Golden-section maximizer of the internal score along origin + t * dir.
  // The interpolated depth is quasiconcave, so it is unimodal on every line
  // and the section search is globally correct there.
  auto line_max = [&](const Eigen::VectorXd& origin, const Eigen::VectorXd& dir,
                      double lo, double hi, int iters) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo;
    double b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    LocScore f1 = score(origin + x1 * dir);
    LocScore f2 = score(origin + x2 * dir);
    evals += 2;
    if (loc_report_better(f1, best_score)) { best = origin + x1 * dir; best_score = f1; }
    if (loc_report_better(f2, best_score)) { best = origin + x2 * dir; best_score = f2; }
    for (int i = 0; i < iters; ++i) {
      if (loc_better(f1, f2)) {
        b = x2; x2 = x1; f2 = f1;
        x1 = b - gr * (b - a);
        f1 = score(origin + x1 * dir);
        ++evals;
        if (loc_report_better(f1, best_score)) { best = origin + x1 * dir; best_score = f1; }
      } else {
        a = x1; x1 = x2; f1 = f2;
        x2 = a + gr * (b - a);
        f2 = score(origin + x2 * dir);
        ++evals;
        if (loc_report_better(f2, best_score)) { best = origin + x2 * dir; best_score = f2; }
      }
    }
    return loc_better(f1, f2) ? (origin + x1 * dir).eval() : (origin + x2 * dir).eval();
  };

  Eigen::VectorXd center = seed;
  for (int run = 0; run <= config.restarts; ++run) {
    // Each run owns a slice of the budget so later restarts fire even when
    // an earlier run stalls without collapsing its simplex.
    const int run_end =
        run == config.restarts
            ? budget
            : std::min(budget, (run + 1) * (budget / (config.restarts + 1)));
    const Eigen::VectorXd anchor = center;
    vert[0] = center;
    vsc[0] = score(vert[0]);
    ++evals;
    for (Eigen::Index j = 0; j < p; ++j) {
      vert[static_cast<std::size_t>(j) + 1] = center;
      vert[static_cast<std::size_t>(j) + 1][j] += radius[j];
      vsc[static_cast<std::size_t>(j) + 1] = score(vert[static_cast<std::size_t>(j) + 1]);
      ++evals;
    }

    std::vector<int> order(static_cast<std::size_t>(nverts));
    while (evals < run_end) {
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return loc_better(vsc[static_cast<std::size_t>(a)], vsc[static_cast<std::size_t>(b)]);
      });
      int worst = order.back();
      int second = order[order.size() - 2];
      int top = order.front();

      double diam = 0;
      for (int v = 0; v < nverts; ++v)
        diam = std::max(diam, (vert[static_cast<std::size_t>(v)] - vert[static_cast<std::size_t>(top)]).norm());
      if (diam < 1e-9 * (1.0 + vert[static_cast<std::size_t>(top)].norm())) break;

      Eigen::VectorXd centroid = Eigen::VectorXd::Zero(p);
      for (int v = 0; v < nverts; ++v)
        if (v != worst) centroid += vert[static_cast<std::size_t>(v)];
      centroid /= static_cast<double>(nverts - 1);

      Eigen::VectorXd refl = centroid + (centroid - vert[static_cast<std::size_t>(worst)]);
      LocScore rsc = score(refl);
      ++evals;
      if (loc_better(rsc, vsc[static_cast<std::size_t>(top)])) {
        Eigen::VectorXd expd = centroid + expand_c * (centroid - vert[static_cast<std::size_t>(worst)]);
        LocScore esc = score(expd);
        ++evals;
        if (loc_better(esc, rsc)) {
          vert[static_cast<std::size_t>(worst)] = expd;
          vsc[static_cast<std::size_t>(worst)] = esc;
        } else {
          vert[static_cast<std::size_t>(worst)] = refl;
          vsc[static_cast<std::size_t>(worst)] = rsc;
        }
      } else if (loc_better(rsc, vsc[static_cast<std::size_t>(second)])) {
        vert[static_cast<std::size_t>(worst)] = refl;
        vsc[static_cast<std::size_t>(worst)] = rsc;
      } else {
        Eigen::VectorXd ctr = centroid + contract_c * (vert[static_cast<std::size_t>(worst)] - centroid);
        LocScore csc = score(ctr);
        ++evals;
        if (loc_better(csc, vsc[static_cast<std::size_t>(worst)])) {
          vert[static_cast<std::size_t>(worst)] = ctr;
          vsc[static_cast<std::size_t>(worst)] = csc;
        } else {
          for (int v = 0; v < nverts; ++v) {
            if (v == top) continue;
            vert[static_cast<std::size_t>(v)] =
                vert[static_cast<std::size_t>(top)] +
                shrink_c * (vert[static_cast<std::size_t>(v)] - vert[static_cast<std::size_t>(top)]);
            vsc[static_cast<std::size_t>(v)] = score(vert[static_cast<std::size_t>(v)]);
            ++evals;
          }
        }
      }
      for (int v = 0; v < nverts; ++v)
        if (loc_report_better(vsc[static_cast<std::size_t>(v)], best_score)) {
          best = vert[static_cast<std::size_t>(v)];
          best_score = vsc[static_cast<std::size_t>(v)];
        }
    }
    int top = 0;
    for (int v = 1; v < nverts; ++v)
      if (loc_better(vsc[static_cast<std::size_t>(v)], vsc[static_cast<std::size_t>(top)])) top = v;
    center = vert[static_cast<std::size_t>(top)];
    for (int v = 0; v < nverts; ++v)
      if (loc_report_better(vsc[static_cast<std::size_t>(v)], best_score)) {
        best = vert[static_cast<std::size_t>(v)];
        best_score = vsc[static_cast<std::size_t>(v)];
      }
    if (evals >= budget) break;
    // Pattern move: the run's net displacement estimates the ridge axis, so
    // extend the search along it before the next restart.
    const Eigen::VectorXd delta = center - anchor;
    if (run < config.restarts && delta.norm() > 1e-12 && evals + 40 < budget) {
      center = line_max(center, delta, -0.5, 6.0, 28);
    }
  }

  LocationReport rep;
  rep.estimate = best;
  rep.achieved_depth = tukey_depth_empirical(best, data, dirs).value;
  rep.seed_depth = tukey_depth_empirical(seed, data, dirs).value;
  rep.evaluations = evals;
  return rep;
}

// ---------------------------------------------------------------------------
// Scatter: structural seed + coordinate ascent.

namespace {

std::vector<std::pair<int, int>> free_entries(int p, const StructureClass& cls,
                                              const std::vector<int>& support) {
  std::vector<std::pair<int, int>> out;
  switch (cls.kind) {
    case StructureKind::General:
      for (int i = 0; i < p; ++i)
        for (int j = i; j < p; ++j) out.emplace_back(i, j);
      break;
    case StructureKind::Banded:
      for (int i = 0; i < p; ++i)
        for (int j = i; j < p && j - i <= cls.k; ++j) out.emplace_back(i, j);
      break;
    case StructureKind::Sparse: {
      std::vector<char> in(static_cast<std::size_t>(p), 0);
      for (int r : support) in[static_cast<std::size_t>(r)] = 1;
      for (int i = 0; i < p; ++i) out.emplace_back(i, i);
      for (int i = 0; i < p; ++i)
        for (int j = i + 1; j < p; ++j)
          if (in[static_cast<std::size_t>(i)] && in[static_cast<std::size_t>(j)])
            out.emplace_back(i, j);
      break;
    }
  }
  return out;
}

bool matrix_is_psd(const Eigen::MatrixXd& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) return false;
  double norm = std::max(std::abs(es.eigenvalues()(0)),
                         std::abs(es.eigenvalues()(g.rows() - 1)));
  return es.eigenvalues()(0) >= -1e-10 * std::max(norm, 1.0);
}

double support_mass(const Eigen::MatrixXd& seed, const std::vector<int>& rows) {
  // Off-diagonal energy captured by keeping rows x rows.
  double acc = 0;
  for (std::size_t a = 0; a < rows.size(); ++a)
    for (std::size_t b = a + 1; b < rows.size(); ++b)
      acc += std::abs(seed(rows[a], rows[b]));
  return acc;
}

// Enumerates all ascending size-s subsets of {0..p-1}; calls fn on each.
template <typename Fn>
void for_each_support(int p, int s, Fn&& fn) {
  std::vector<int> idx(static_cast<std::size_t>(s));
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    int pos = s - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == p - s + pos) --pos;
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (int t = pos + 1; t < s; ++t)
      idx[static_cast<std::size_t>(t)] = idx[static_cast<std::size_t>(t - 1)] + 1;
  }
}

double support_count_exact(double p, double s) {
  double r = 1;
  for (int t = 0; t < s; ++t) r = r * (p - t) / (t + 1);
  return r;
}

}  // namespace

EstimatorReport deepest_covariance(const Eigen::MatrixXd& data,
                                   const DirectionSet& dirs,
                                   const StructureClass& cls,
                                   const OptimizerConfig& config) {
  check_data(data);
  const int p = static_cast<int>(data.cols());
  if (dirs.dim != p) throw invalid_input("direction set dimension does not match data");
  if (dirs.count() == 0) throw invalid_input("empty direction set");
  switch (cls.kind) {
    case StructureKind::General:
      if (dirs.kind == NetKind::Banded || dirs.kind == NetKind::Sparse)
        throw invalid_input("structured net passed with the general class");
      break;
    case StructureKind::Banded:
      if (cls.k < 0 || cls.k >= p) throw invalid_input("band half-width out of range");
      if (dirs.kind != NetKind::Banded || dirs.structure != cls.k)
        throw invalid_input("banded class requires a banded net with matching k");
      break;
    case StructureKind::Sparse:
      if (cls.s < 1 || cls.s > p) throw invalid_input("sparsity level out of range");
      if (dirs.kind != NetKind::Sparse || dirs.structure != cls.s)
        throw invalid_input("sparse class requires a sparse net with matching s");
      break;
  }

  MatrixDepthEvaluator eval(data, dirs);
  const SymmetricMatrix raw_seed = median_fit_seed(data);

  EstimatorReport rep;

  // Structural seed.
  Eigen::MatrixXd seed_mat;
  switch (cls.kind) {
    case StructureKind::General:
      seed_mat = psd_floor(raw_seed).matrix();
      break;
    case StructureKind::Banded:
      seed_mat = psd_floor(project_banded(raw_seed, cls.k)).matrix();
      break;
    case StructureKind::Sparse: {
      // Rank rows by off-diagonal seed mass, then refine the support on the
      // depth objective (all candidates share the full diagonal).
      std::vector<std::pair<double, int>> rank;
      rank.reserve(static_cast<std::size_t>(p));
      for (int i = 0; i < p; ++i) {
        double m = 0;
        for (int j = 0; j < p; ++j)
          if (j != i) m += std::abs(raw_seed.matrix()(i, j));
        rank.emplace_back(-m, i);
      }
      std::sort(rank.begin(), rank.end());
      std::vector<int> sel;
      for (int t = 0; t < cls.s; ++t) sel.push_back(rank[static_cast<std::size_t>(t)].second);
      std::sort(sel.begin(), sel.end());

      auto score_support = [&](const std::vector<int>& sup, int floor)
          -> std::pair<int, Eigen::MatrixXd> {
        SymmetricMatrix cand = psd_floor(project_sparse_support(raw_seed, sup));
        return {eval.depth_count(cand.matrix(), floor), cand.matrix()};
      };

      if (support_count_exact(p, cls.s) <= 1e4) {
        rep.support_exhaustive = true;
        int best_count = -1;
        double best_mass = -1;
        Eigen::MatrixXd best_mat;
        std::vector<int> best_sup;
        for_each_support(p, cls.s, [&](const std::vector<int>& sup) {
          // Floor prunes candidates provably below the incumbent; ties are
          // scanned fully so the mass tie-break stays exact.
          auto [cnt, mat] = score_support(sup, best_count);
          double mass = support_mass(raw_seed.matrix(), sup);
          if (cnt > best_count || (cnt == best_count && mass > best_mass)) {
            best_count = cnt;
            best_mass = mass;
            best_mat = mat;
            best_sup = sup;
          }
        });
        sel = best_sup;
        seed_mat = best_mat;
      } else {
        auto [cnt, mat] = score_support(sel, 0);
        int cur_count = cnt;
        seed_mat = mat;
        // One swap-refinement round.
        std::vector<char> in(static_cast<std::size_t>(p), 0);
        for (int r : sel) in[static_cast<std::size_t>(r)] = 1;
        std::vector<int> best_sel = sel;
        int best_count = cur_count;
        Eigen::MatrixXd best_mat2 = seed_mat;
        for (int out : sel) {
          for (int add = 0; add < p; ++add) {
            if (in[static_cast<std::size_t>(add)]) continue;
            std::vector<int> trial;
            for (int r : sel)
              if (r != out) trial.push_back(r);
            trial.push_back(add);
            std::sort(trial.begin(), trial.end());
            auto [tc, tm] = score_support(trial, best_count + 1);
            if (tc > best_count) {
              best_count = tc;
              best_sel = trial;
              best_mat2 = tm;
            }
          }
        }
        sel = best_sel;
        seed_mat = best_mat2;
      }
      rep.support = sel;
      break;
    }
  }

  const auto params = free_entries(p, cls, rep.support);
  const double entry_cap =
      cls.spectral_bound > 0 ? cls.spectral_bound * beta_constant()
                             : std::numeric_limits<double>::infinity();
  if (std::isfinite(entry_cap)) {
    // Scale the seed into the search box; scaling keeps PSD and structure.
    const double top = seed_mat.cwiseAbs().maxCoeff();
    if (top > entry_cap) seed_mat *= entry_cap / top;
  }
  eval.set_current(seed_mat);
  int cur_count = eval.current_count();
  const int seed_count = cur_count;

  Eigen::MatrixXd cur = seed_mat;
  double diag_scale = cur.diagonal().mean();
  double step = config.init_step_rel * (diag_scale > 0 ? diag_scale : 1.0);

  int sweeps = 0;
  bool converged = false;
  while (sweeps < config.max_sweeps) {
    ++sweeps;
    bool accepted_any = false;
    for (const auto& [i, j] : params) {
      for (double delta : {step, -step}) {
        double v = cur(i, j) + delta;
        if (i == j && v < 0) continue;
        if (std::abs(v) > entry_cap) continue;
        int cnt = eval.probe_entry(i, j, delta, cur_count);
        if (cnt < cur_count) continue;
        double old_off = cur(i, j) - seed_mat(i, j);
        double new_off = v - seed_mat(i, j);
        if (cnt == cur_count && !(new_off * new_off < old_off * old_off)) continue;
        Eigen::MatrixXd trial = cur;
        trial(i, j) = v;
        trial(j, i) = v;
        if (!matrix_is_psd(trial)) continue;
        cur = std::move(trial);
        eval.accept_entry(i, j, delta);
        cur_count = eval.current_count();
        accepted_any = true;
        break;  // next entry; re-probing the mirror move rarely pays
      }
    }
    if (!accepted_any) {
      step *= config.shrink;
      if (step < config.min_step) {
        converged = true;
        break;
      }
    }
  }

  SymmetricMatrix est(cur);
  double achieved = matrix_depth_empirical(est, data, dirs).value;
  double seed_depth = static_cast<double>(seed_count) / static_cast<double>(data.rows());
  if (achieved < seed_depth) {
    // Incremental bookkeeping can only lose to a fresh evaluation through
    // roundoff on tied projections; the seed is the safe fallback.
    est = SymmetricMatrix(seed_mat);
    achieved = matrix_depth_empirical(est, data, dirs).value;
    converged = false;
  }
  rep.estimate = est;
  rep.achieved_depth = achieved;
  rep.seed_depth = seed_depth;
  rep.sweeps = sweeps;
  rep.converged = converged;
  return rep;
}

SymmetricMatrix scale_to_sigma(const SymmetricMatrix& gamma) {
  return SymmetricMatrix(gamma.matrix() / beta_constant());
}

int bandable_bandwidth(int n, double alpha) {
  if (n < 1) throw invalid_input("bandwidth rule requires n >= 1");
  if (!(alpha > 0)) throw invalid_input("bandwidth rule requires alpha > 0");
  double raw = std::pow(static_cast<double>(n), 1.0 / (2.0 * alpha + 1.0));
  int k = static_cast<int>(std::ceil(raw - 1e-9));
  return std::max(k, 1);
}

SparsePcaResult sparse_pca(const SymmetricMatrix& gamma, int r) {
  const int p = gamma.dim();
  if (r < 1 || r > p) throw invalid_input("subspace rank out of range");
  SpectralDecomposition sd = eigh(gamma);
  SparsePcaResult out;
  out.basis = sd.eigenvectors.leftCols(r);
  out.projector = out.basis * out.basis.transpose();
  if (r < p) out.small_gap = (sd.eigenvalues(r - 1) - sd.eigenvalues(r)) < 1e-12;
  return out;
}

double subspace_loss(const Eigen::MatrixXd& p1, const Eigen::MatrixXd& p2) {
  if (p1.rows() != p1.cols() || p2.rows() != p2.cols() || p1.rows() != p2.rows())
    throw invalid_input("projector shape mismatch");
  auto check_projector = [](const Eigen::MatrixXd& q) {
    if (!q.allFinite()) throw invalid_input("projector has non-finite entries");
    double scale = 1.0 + q.norm();
    if ((q - q.transpose()).norm() > 1e-8 * scale)
      throw invalid_input("projector is not symmetric");
    if ((q * q - q).norm() > 1e-6 * scale)
      throw invalid_input("projector is not idempotent");
  };
  check_projector(p1);
  check_projector(p2);
  return (p1 - p2).squaredNorm();
}

SymmetricMatrix sample_covariance(const Eigen::MatrixXd& data) {
  check_data(data);
  Eigen::MatrixXd g =
      (data.transpose() * data) / static_cast<double>(data.rows());
  return SymmetricMatrix(g);
}

}  // namespace depthcov
