// SPDX-License-Identifier: Apache-2.0
#ifndef DEPTHCOV_LINALG_HPP
#define DEPTHCOV_LINALG_HPP

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

namespace depthcov {

// Dense symmetric matrix.  Construction symmetrizes ((A + A^T) / 2) so the
// stored matrix is exactly symmetric; entries must be finite.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(const Eigen::MatrixXd& a);
  static SymmetricMatrix identity(int p);
  static SymmetricMatrix zero(int p);

  int dim() const { return static_cast<int>(mat_.rows()); }
  double operator()(int i, int j) const { return mat_(i, j); }
  const Eigen::MatrixXd& matrix() const { return mat_; }

  // Sets both (i, j) and (j, i).
  void set(int i, int j, double v) {
    mat_(i, j) = v;
    mat_(j, i) = v;
  }

  bool is_psd() const;

 private:
  Eigen::MatrixXd mat_;
};

// PSD slack: eigenvalues down to -psd_tolerance(A) still count as PSD.
double psd_tolerance(const SymmetricMatrix& a);

struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd eigenvectors;  // orthonormal columns, matched order
};

// Eigenvalues descending; each eigenvector's first component larger than
// 1e-12 in magnitude is made positive, so the decomposition is reproducible.
SpectralDecomposition eigh(const SymmetricMatrix& a);

double operator_norm(const SymmetricMatrix& a);
double frobenius_norm(const SymmetricMatrix& a);

// Zeroes every entry with |i - j| > k.  k >= dim returns a copy of a.
SymmetricMatrix project_banded(const SymmetricMatrix& a, int k);

// Keeps the diagonal and the off-diagonal block indexed by support x support.
SymmetricMatrix project_sparse_support(const SymmetricMatrix& a,
                                       const std::vector<int>& support);

// Frobenius projection onto the PSD cone (negative eigenvalues clamped).
// A matrix that is already PSD is returned unchanged.
SymmetricMatrix psd_floor(const SymmetricMatrix& a);

// Plain text format: first line is the dimension p, then p rows of p
// space-separated values.  Values round-trip exactly (17 significant digits).
void write_matrix(std::ostream& os, const SymmetricMatrix& a);
SymmetricMatrix read_matrix(std::istream& is);
void save_matrix(const std::string& path, const SymmetricMatrix& a);
SymmetricMatrix load_matrix(const std::string& path);

}  // namespace depthcov

#endif  // DEPTHCOV_LINALG_HPP
