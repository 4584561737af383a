// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_DIRECTIONS_HPP
#define DEPTHCOV_DIRECTIONS_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace depthcov {

enum class NetKind { Sphere, Banded, Sparse, BasisPolarization, Custom };

std::string net_kind_name(NetKind kind);
NetKind net_kind_from_name(const std::string& name);

// A finite set of unit directions, one representative per antipodal pair
// (canonical sign: the first coordinate larger than 1e-12 in magnitude is
// positive).  Directions live in the rows of `dirs`.
struct DirectionSet {
  int dim = 0;
  NetKind kind = NetKind::Custom;
  int structure = 0;     // k for Banded, s for Sparse, 0 otherwise
  double delta = 0.0;    // requested resolution, 0 when not applicable
  double resolution = 0.0;  // achieved resolution estimate (see docs)
  bool budget_exhausted = false;  // stopped at budget before reaching delta
  bool subsampled = false;        // sparse supports were subsampled
  Eigen::MatrixXd dirs;  // count x dim

  int count() const { return static_cast<int>(dirs.rows()); }
};

// Distance between directions modulo sign: min(|u - v|, |u + v|).
double direction_distance(const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Flips sign so the first component with magnitude > 1e-12 is positive.
void canonicalize_sign(Eigen::VectorXd& u);

// Net of the unit sphere modulo sign with covering radius target delta.
// p <= 3 uses deterministic constructions whose covering radius is provably
// <= delta (a count above `budget` raises construction_error).  p > 3 runs
// greedy farthest-point selection over a seeded uniform candidate pool and
// stops at resolution delta or at `budget` directions, whichever comes
// first; `resolution` records the final insertion gap, a lower bound on the
// true covering radius.
DirectionSet build_sphere_net(int p, double delta, int budget,
                              std::uint64_t seed);

// Union of sphere nets over all contiguous index windows of width 2k
// (the whole sphere when 2k >= p).  `budget` applies per window.
DirectionSet build_banded_net(int p, int k, double delta, int budget,
                              std::uint64_t seed);

struct SparseNetOptions {
  int enumeration_cap = 100000;  // refuse to enumerate more supports
  bool allow_subsample = false;  // permit seeded support subsampling
  int subsample_supports = 240;  // supports kept when subsampling
};

// Union of sphere nets over coordinate supports of size 2s (the whole
// sphere when 2s >= p).  `budget` applies per support.  When the number of
// supports exceeds the enumeration cap, a seeded subsample is taken if
// allowed (result flagged `subsampled`), otherwise construction_error.
DirectionSet build_sparse_net(int p, int s, double delta, int budget,
                              std::uint64_t seed,
                              const SparseNetOptions& options = {});

// The p^2 directions {e_i} + {(e_i +/- e_j)/sqrt(2), i < j}.
DirectionSet polarization_basis(int p);

// Wraps caller-provided rows: validates unit norm (1e-12), canonicalizes
// signs, removes duplicates (tolerance 1e-9).
DirectionSet custom_directions(const Eigen::MatrixXd& rows);

// Concatenates sets over the same dimension into a Custom set (deduped).
DirectionSet merge_direction_sets(const std::vector<DirectionSet>& sets);

// Monte Carlo covering radius: max over `probes` random unit vectors
// (restricted to the structural class of U.kind) of the distance to U.
// A sampled maximum, hence a lower bound on the true covering radius.
double covering_radius_estimate(const DirectionSet& u, int probes,
                                std::uint64_t seed);

// Text format: header "p kind structure delta resolution flags count",
// then one direction per line.  Bit-exact round trip.
void write_directions(std::ostream& os, const DirectionSet& u);
DirectionSet read_directions(std::istream& is);
void save_directions(const std::string& path, const DirectionSet& u);
DirectionSet load_directions(const std::string& path);

}  // namespace depthcov

#endif  // DEPTHCOV_DIRECTIONS_HPP
