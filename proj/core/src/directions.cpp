// SPDX-License-Identifier: Apache-2.0
#include "depthcov/directions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "depthcov/common.hpp"

namespace depthcov {

std::string net_kind_name(NetKind kind) {
  switch (kind) {
    case NetKind::Sphere: return "sphere";
    case NetKind::Banded: return "banded";
    case NetKind::Sparse: return "sparse";
    case NetKind::BasisPolarization: return "basis";
    case NetKind::Custom: return "custom";
  }
  throw invalid_input("net_kind_name: unknown kind");
}

NetKind net_kind_from_name(const std::string& name) {
  if (name == "sphere") return NetKind::Sphere;
  if (name == "banded") return NetKind::Banded;
  if (name == "sparse") return NetKind::Sparse;
  if (name == "basis") return NetKind::BasisPolarization;
  if (name == "custom") return NetKind::Custom;
  throw invalid_input("net_kind_from_name: unknown kind " + name);
}

double direction_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  // min(|u - v|, |u + v|); for unit vectors this equals sqrt(2 - 2|u.v|)
  // but stays exact near zero where the dot-product form loses ~1e-8 to
  // cancellation.
  return std::sqrt(std::min((u - v).squaredNorm(), (u + v).squaredNorm()));
}

void canonicalize_sign(Eigen::VectorXd& u) {
  for (int i = 0; i < u.size(); ++i) {
    if (std::fabs(u(i)) > 1e-12) {
      if (u(i) < 0.0) u = -u;
      return;
    }
  }
}

namespace {

// Bucketed near-duplicate filter; exact constructions yield bit-identical
// duplicates, so quantized hashing plus an in-bucket distance check suffices.
class DedupSet {
 public:
  explicit DedupSet(int dim) : dim_(dim) {}

  bool insert(const Eigen::VectorXd& u) {
    std::vector<long long> key(dim_);
    for (int i = 0; i < dim_; ++i) {
      key[i] = llround(u(i) * 1e7);
    }
    auto [it, fresh] = buckets_.try_emplace(std::move(key));
    for (int idx : it->second) {
      if (direction_distance(rows_[idx], u) < 1e-9) return false;
    }
    (void)fresh;
    it->second.push_back(static_cast<int>(rows_.size()));
    rows_.push_back(u);
    return true;
  }

  Eigen::MatrixXd matrix() const {
    Eigen::MatrixXd m(rows_.size(), dim_);
    for (size_t i = 0; i < rows_.size(); ++i) m.row(i) = rows_[i];
    return m;
  }

  int size() const { return static_cast<int>(rows_.size()); }

 private:
  int dim_;
  std::map<std::vector<long long>, std::vector<int>> buckets_;
  std::vector<Eigen::VectorXd> rows_;
};

void validate_net_args(int p, double delta, int budget) {
  if (p < 1) throw invalid_input("direction net: p must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw invalid_input("direction net: delta must be in (0, 1)");
  }
  if (budget < 1) throw invalid_input("direction net: budget must be >= 1");
}

// Equally spaced points on the half circle; max projective angular gap
// pi/m <= 2*asin(delta/2), so every direction is within chord distance
// 2*sin(asin(delta/2)/2) <= delta of the net.
Eigen::MatrixXd circle_net(double delta, int budget, double* resolution) {
  const int m = static_cast<int>(
      std::ceil(M_PI / (2.0 * std::asin(0.5 * delta))));
  if (m > budget) {
    throw construction_error("build_sphere_net: p=2 net needs " +
                             std::to_string(m) + " directions > budget");
  }
  *resolution = 2.0 * std::sin(0.5 * M_PI / m);
  Eigen::MatrixXd out(m, 2);
  for (int j = 0; j < m; ++j) {
    const double a = M_PI * j / m;
    Eigen::VectorXd u(2);
    u << std::cos(a), std::sin(a);
    canonicalize_sign(u);
    out.row(j) = u;
  }
  return out;
}

struct TriMesh {
  std::vector<Eigen::Vector3d> verts;
  std::vector<std::array<int, 3>> faces;
};

TriMesh octahedron() {
  TriMesh m;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign = 0; sign < 2; ++sign) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      v(axis) = sign ? -1.0 : 1.0;
      m.verts.push_back(v);
    }
  }
  // vertex ids: +x 0, -x 1, +y 2, -y 3, +z 4, -z 5
  m.faces = {{0, 2, 4}, {2, 1, 4}, {1, 3, 4}, {3, 0, 4},
             {2, 0, 5}, {1, 2, 5}, {3, 1, 5}, {0, 3, 5}};
  return m;
}

TriMesh subdivide(const TriMesh& in) {
  TriMesh out;
  out.verts = in.verts;
  std::map<std::pair<int, int>, int> midpoint;
  auto mid = [&](int a, int b) {
    const auto key = std::minmax(a, b);
    auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    Eigen::Vector3d v = (out.verts[a] + out.verts[b]).normalized();
    out.verts.push_back(v);
    const int id = static_cast<int>(out.verts.size()) - 1;
    midpoint.emplace(key, id);
    return id;
  };
  for (const auto& f : in.faces) {
    const int ab = mid(f[0], f[1]);
    const int bc = mid(f[1], f[2]);
    const int ca = mid(f[2], f[0]);
    out.faces.push_back({f[0], ab, ca});
    out.faces.push_back({f[1], bc, ab});
    out.faces.push_back({f[2], ca, bc});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

double max_edge_chord(const TriMesh& m) {
  double worst = 0.0;
  for (const auto& f : m.faces) {
    for (int e = 0; e < 3; ++e) {
      const double d = (m.verts[f[e]] - m.verts[f[(e + 1) % 3]]).norm();
      worst = std::max(worst, d);
    }
  }
  return worst;
}

// Subdivided octahedron.  Any sphere point lies in some spherical triangle;
// with max planar edge chord s, its distance to the nearest vertex is at
// most s/sqrt(3) + s^2/3 (planar circumradius bound plus the radial lift),
// so stopping at s/sqrt(3) + s^2/3 <= delta guarantees the covering radius.
Eigen::MatrixXd sphere3_net(double delta, int budget, double* resolution) {
  TriMesh mesh = octahedron();
  for (int level = 0; level <= 16; ++level) {
    const double s = max_edge_chord(mesh);
    if (s / std::sqrt(3.0) + s * s / 3.0 <= delta) {
      *resolution = s / std::sqrt(3.0) + s * s / 3.0;
      DedupSet dedup(3);
      for (const auto& v : mesh.verts) {
        Eigen::VectorXd u = v;
        canonicalize_sign(u);
        dedup.insert(u);
      }
      if (dedup.size() > budget) {
        throw construction_error(
            "build_sphere_net: p=3 net needs " +
            std::to_string(dedup.size()) + " directions > budget");
      }
      return dedup.matrix();
    }
    if (mesh.verts.size() > 2000000) break;
    mesh = subdivide(mesh);
  }
  throw construction_error("build_sphere_net: p=3 subdivision did not reach target");
}

Eigen::VectorXd random_unit(Rng& rng, int p) {
  Eigen::VectorXd u(p);
  double norm2 = 0.0;
  do {
    for (int i = 0; i < p; ++i) u(i) = rng.normal();
    norm2 = u.squaredNorm();
  } while (norm2 < 1e-12);
  u /= std::sqrt(norm2);
  return u;
}

// Greedy farthest-point pass over a seeded uniform candidate pool.
Eigen::MatrixXd greedy_net(int p, double delta, int budget, std::uint64_t seed,
                           double* resolution, bool* exhausted) {
  Rng rng(seed_combine(seed, "sphere_net"));
  const int pool_size = std::max(2048, std::min(20000, 8 * budget));
  Eigen::MatrixXd pool(pool_size, p);
  for (int i = 0; i < pool_size; ++i) {
    Eigen::VectorXd u = random_unit(rng, p);
    canonicalize_sign(u);
    pool.row(i) = u;
  }
  std::vector<double> gap(pool_size, std::numeric_limits<double>::infinity());
  std::vector<Eigen::VectorXd> picked;
  int next = 0;  // pool[0] seeds the net
  double worst = std::numeric_limits<double>::infinity();
  for (;;) {
    const Eigen::VectorXd u = pool.row(next);
    picked.push_back(u);
    worst = 0.0;
    for (int i = 0; i < pool_size; ++i) {
      const double dot = std::fabs(pool.row(i).dot(u));
      const double d = std::sqrt(std::max(0.0, 2.0 - 2.0 * dot));
      if (d < gap[i]) gap[i] = d;
      if (gap[i] > worst) {
        worst = gap[i];
        next = i;
      }
    }
    if (worst < delta) {
      *exhausted = false;
      break;
    }
    if (static_cast<int>(picked.size()) >= budget) {
      *exhausted = true;
      break;
    }
  }
  *resolution = worst;
  Eigen::MatrixXd out(picked.size(), p);
  for (size_t i = 0; i < picked.size(); ++i) out.row(i) = picked[i];
  return out;
}

// Sub-sphere template used by both banded and sparse nets.
Eigen::MatrixXd sphere_template(int m, double delta, int budget,
                                std::uint64_t seed, double* resolution,
                                bool* exhausted) {
  *resolution = 0.0;
  *exhausted = false;
  if (m == 1) return Eigen::MatrixXd::Ones(1, 1);
  if (m == 2) return circle_net(delta, budget, resolution);
  if (m == 3) return sphere3_net(delta, budget, resolution);
  return greedy_net(m, delta, budget, seed, resolution, exhausted);
}

}  // namespace

DirectionSet build_sphere_net(int p, double delta, int budget,
                              std::uint64_t seed) {
  validate_net_args(p, delta, budget);
  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::Sphere;
  out.delta = delta;
  out.dirs = sphere_template(p, delta, budget, seed, &out.resolution,
                             &out.budget_exhausted);
  return out;
}

DirectionSet build_banded_net(int p, int k, double delta, int budget,
                              std::uint64_t seed) {
  validate_net_args(p, delta, budget);
  if (k < 0) throw invalid_input("build_banded_net: k must be >= 0");
  const int width = std::min(std::max(2 * k, 1), p);
  double res = 0.0;
  bool exhausted = false;
  const Eigen::MatrixXd tmpl = sphere_template(
      width, delta, budget, seed_combine(seed, "banded"), &res, &exhausted);
  DedupSet dedup(p);
  for (int l = 0; l + width <= p; ++l) {
    for (int r = 0; r < tmpl.rows(); ++r) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
      u.segment(l, width) = tmpl.row(r);
      canonicalize_sign(u);
      dedup.insert(u);
    }
  }
  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::Banded;
  out.structure = k;
  out.delta = delta;
  out.resolution = res;
  out.budget_exhausted = exhausted;
  out.dirs = dedup.matrix();
  return out;
}

namespace {

double binomial_approx(int n, int k) {
  double v = 1.0;
  for (int i = 0; i < k; ++i) v *= double(n - i) / double(i + 1);
  return v;
}

std::vector<std::vector<int>> enumerate_supports(int p, int w) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(w);
  for (int i = 0; i < w; ++i) cur[i] = i;
  for (;;) {
    out.push_back(cur);
    int i = w - 1;
    while (i >= 0 && cur[i] == p - w + i) --i;
    if (i < 0) break;
    ++cur[i];
    for (int j = i + 1; j < w; ++j) cur[j] = cur[j - 1] + 1;
  }
  return out;
}

std::vector<std::vector<int>> sample_supports(int p, int w, int want,
                                              std::uint64_t seed) {
  Rng rng(seed_combine(seed, "supports"));
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> out;
  std::vector<int> idx(p);
  while (static_cast<int>(out.size()) < want) {
    for (int i = 0; i < p; ++i) idx[i] = i;
    // Partial Fisher-Yates: first w entries become the support.
    for (int i = 0; i < w; ++i) {
      const int j = i + static_cast<int>(rng.below(p - i));
      std::swap(idx[i], idx[j]);
    }
    std::vector<int> s(idx.begin(), idx.begin() + w);
    std::sort(s.begin(), s.end());
    if (seen.insert(s).second) out.push_back(std::move(s));
  }
  return out;
}

}  // namespace

DirectionSet build_sparse_net(int p, int s, double delta, int budget,
                              std::uint64_t seed,
                              const SparseNetOptions& options) {
  validate_net_args(p, delta, budget);
  if (s < 1) throw invalid_input("build_sparse_net: s must be >= 1");
  const int width = std::min(2 * s, p);
  double res = 0.0;
  bool exhausted = false;
  const Eigen::MatrixXd tmpl = sphere_template(
      width, delta, budget, seed_combine(seed, "sparse"), &res, &exhausted);

  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::Sparse;
  out.structure = s;
  out.delta = delta;
  out.resolution = res;
  out.budget_exhausted = exhausted;

  std::vector<std::vector<int>> supports;
  if (width >= p) {
    supports.push_back({});
    supports[0].resize(p);
    for (int i = 0; i < p; ++i) supports[0][i] = i;
  } else {
    const double total = binomial_approx(p, width);
    if (total <= options.subsample_supports) {
      supports = enumerate_supports(p, width);
    } else if (total <= options.enumeration_cap &&
               !options.allow_subsample) {
      supports = enumerate_supports(p, width);
    } else if (options.allow_subsample) {
      supports = sample_supports(p, width, options.subsample_supports, seed);
      out.subsampled = true;
    } else {
      throw construction_error(
          "build_sparse_net: support count exceeds enumeration cap; "
          "enable subsampling");
    }
  }

  DedupSet dedup(p);
  for (const auto& sup : supports) {
    for (int r = 0; r < tmpl.rows(); ++r) {
      Eigen::VectorXd u = Eigen::VectorXd::Zero(p);
      for (int i = 0; i < width; ++i) u(sup[i]) = tmpl(r, i);
      canonicalize_sign(u);
      dedup.insert(u);
    }
  }
  out.dirs = dedup.matrix();
  return out;
}

DirectionSet polarization_basis(int p) {
  if (p < 1) throw invalid_input("polarization_basis: p must be >= 1");
  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::BasisPolarization;
  out.dirs.resize(p * p, p);
  out.dirs.setZero();
  int row = 0;
  for (int i = 0; i < p; ++i) out.dirs(row++, i) = 1.0;
  const double c = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < p; ++i) {
    for (int j = i + 1; j < p; ++j) {
      out.dirs(row, i) = c;
      out.dirs(row, j) = c;
      ++row;
      out.dirs(row, i) = c;
      out.dirs(row, j) = -c;
      ++row;
    }
  }
  return out;
}

DirectionSet custom_directions(const Eigen::MatrixXd& rows) {
  if (rows.rows() == 0 || rows.cols() == 0) {
    throw invalid_input("custom_directions: empty input");
  }
  const int p = static_cast<int>(rows.cols());
  DedupSet dedup(p);
  for (int r = 0; r < rows.rows(); ++r) {
    Eigen::VectorXd u = rows.row(r);
    if (std::fabs(u.norm() - 1.0) > 1e-12) {
      throw invalid_input("custom_directions: row " + std::to_string(r) +
                          " is not unit norm");
    }
    canonicalize_sign(u);
    dedup.insert(u);
  }
  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::Custom;
  out.dirs = dedup.matrix();
  return out;
}

DirectionSet merge_direction_sets(const std::vector<DirectionSet>& sets) {
  if (sets.empty()) throw invalid_input("merge_direction_sets: no sets");
  const int p = sets[0].dim;
  DedupSet dedup(p);
  for (const auto& s : sets) {
    if (s.dim != p) {
      throw invalid_input("merge_direction_sets: dimension mismatch");
    }
    for (int r = 0; r < s.count(); ++r) {
      Eigen::VectorXd u = s.dirs.row(r);
      dedup.insert(u);
    }
  }
  DirectionSet out;
  out.dim = p;
  out.kind = NetKind::Custom;
  out.dirs = dedup.matrix();
  return out;
}

double covering_radius_estimate(const DirectionSet& u, int probes,
                                std::uint64_t seed) {
  if (probes < 1) throw invalid_input("covering_radius_estimate: probes >= 1");
  if (u.count() == 0) throw invalid_input("covering_radius_estimate: empty set");
  Rng rng(seed_combine(seed, "covering"));
  const int p = u.dim;
  double worst = 0.0;
  for (int t = 0; t < probes; ++t) {
    Eigen::VectorXd probe = Eigen::VectorXd::Zero(p);
    if (u.kind == NetKind::Banded && 2 * u.structure < p) {
      const int width = std::max(2 * u.structure, 1);
      const int l = static_cast<int>(rng.below(p - width + 1));
      probe.segment(l, width) = random_unit(rng, width);
    } else if (u.kind == NetKind::Sparse && 2 * u.structure < p) {
      const int width = 2 * u.structure;
      auto sup = sample_supports(p, width, 1, rng.raw())[0];
      const Eigen::VectorXd v = random_unit(rng, width);
      for (int i = 0; i < width; ++i) probe(sup[i]) = v(i);
    } else {
      probe = random_unit(rng, p);
    }
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < u.count(); ++r) {
      const double dot = std::fabs(u.dirs.row(r).dot(probe));
      const double d = std::sqrt(std::max(0.0, 2.0 - 2.0 * dot));
      if (d < best) best = d;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

void write_directions(std::ostream& os, const DirectionSet& u) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", u.delta);
  os << u.dim << ' ' << net_kind_name(u.kind) << ' ' << u.structure << ' '
     << buf;
  std::snprintf(buf, sizeof buf, "%.17g", u.resolution);
  os << ' ' << buf << ' '
     << (int(u.budget_exhausted) | (int(u.subsampled) << 1)) << ' '
     << u.count() << '\n';
  for (int r = 0; r < u.count(); ++r) {
    for (int j = 0; j < u.dim; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", u.dirs(r, j));
      os << buf << (j + 1 == u.dim ? '\n' : ' ');
    }
  }
}

DirectionSet read_directions(std::istream& is) {
  DirectionSet out;
  std::string kind;
  int flags = 0;
  int count = 0;
  if (!(is >> out.dim >> kind >> out.structure >> out.delta >>
        out.resolution >> flags >> count) ||
      out.dim < 1 || count < 0) {
    throw invalid_input("read_directions: malformed header");
  }
  out.kind = net_kind_from_name(kind);
  out.budget_exhausted = flags & 1;
  out.subsampled = flags & 2;
  out.dirs.resize(count, out.dim);
  for (int r = 0; r < count; ++r) {
    for (int j = 0; j < out.dim; ++j) {
      if (!(is >> out.dirs(r, j))) {
        throw invalid_input("read_directions: truncated body");
      }
    }
  }
  return out;
}

void save_directions(const std::string& path, const DirectionSet& u) {
  std::ofstream os(path);
  if (!os) throw invalid_input("save_directions: cannot open " + path);
  write_directions(os, u);
}

DirectionSet load_directions(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw invalid_input("load_directions: cannot open " + path);
  return read_directions(is);
}

}  // namespace depthcov
