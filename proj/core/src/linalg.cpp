// SPDX-License-Identifier: Apache-2.0
#include "depthcov/linalg.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "depthcov/common.hpp"

namespace depthcov {

SymmetricMatrix::SymmetricMatrix(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw invalid_input("SymmetricMatrix: matrix must be square and nonempty");
  }
  if (!a.allFinite()) {
    throw invalid_input("SymmetricMatrix: entries must be finite");
  }
  mat_ = 0.5 * (a + a.transpose());
}

SymmetricMatrix SymmetricMatrix::identity(int p) {
  return SymmetricMatrix(Eigen::MatrixXd::Identity(p, p));
}

SymmetricMatrix SymmetricMatrix::zero(int p) {
  return SymmetricMatrix(Eigen::MatrixXd::Zero(p, p));
}

double psd_tolerance(const SymmetricMatrix& a) {
  return 1e-10 * operator_norm(a);
}

bool SymmetricMatrix::is_psd() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      mat_, Eigen::EigenvaluesOnly);
  const double norm =
      std::max(std::fabs(solver.eigenvalues()(0)),
               std::fabs(solver.eigenvalues()(dim() - 1)));
  return solver.eigenvalues()(0) >= -1e-10 * norm;
}

SpectralDecomposition eigh(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw numeric_error("eigh: eigendecomposition failed to converge");
  }
  const int p = a.dim();
  SpectralDecomposition out;
  out.eigenvalues.resize(p);
  out.eigenvectors.resize(p, p);
  // Eigen sorts ascending; flip to descending.
  for (int c = 0; c < p; ++c) {
    out.eigenvalues(c) = solver.eigenvalues()(p - 1 - c);
    Eigen::VectorXd v = solver.eigenvectors().col(p - 1 - c);
    for (int i = 0; i < p; ++i) {
      if (std::fabs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.eigenvectors.col(c) = v;
  }
  return out;
}

double operator_norm(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      a.matrix(), Eigen::EigenvaluesOnly);
  return std::max(std::fabs(solver.eigenvalues()(0)),
                  std::fabs(solver.eigenvalues()(a.dim() - 1)));
}

double frobenius_norm(const SymmetricMatrix& a) { return a.matrix().norm(); }

SymmetricMatrix project_banded(const SymmetricMatrix& a, int k) {
  if (k < 0) throw invalid_input("project_banded: k must be >= 0");
  const int p = a.dim();
  if (k >= p) return a;
  Eigen::MatrixXd m = a.matrix();
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (std::abs(i - j) > k) m(i, j) = 0.0;
    }
  }
  return SymmetricMatrix(m);
}

SymmetricMatrix project_sparse_support(const SymmetricMatrix& a,
                                       const std::vector<int>& support) {
  const int p = a.dim();
  std::vector<char> in(p, 0);
  for (int s : support) {
    if (s < 0 || s >= p) {
      throw invalid_input("project_sparse_support: index out of range");
    }
    in[s] = 1;
  }
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  m.diagonal() = a.matrix().diagonal();
  for (int i = 0; i < p; ++i) {
    if (!in[i]) continue;
    for (int j = 0; j < p; ++j) {
      if (i != j && in[j]) m(i, j) = a(i, j);
    }
  }
  return SymmetricMatrix(m);
}

SymmetricMatrix psd_floor(const SymmetricMatrix& a) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a.matrix());
  if (solver.info() != Eigen::Success) {
    throw numeric_error("psd_floor: eigendecomposition failed");
  }
  if (solver.eigenvalues()(0) >= 0.0) return a;  // exact fixed point
  Eigen::VectorXd lam = solver.eigenvalues().cwiseMax(0.0);
  return SymmetricMatrix(solver.eigenvectors() * lam.asDiagonal() *
                         solver.eigenvectors().transpose());
}

void write_matrix(std::ostream& os, const SymmetricMatrix& a) {
  const int p = a.dim();
  os << p << '\n';
  char buf[64];
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
      os << buf << (j + 1 == p ? '\n' : ' ');
    }
  }
}

SymmetricMatrix read_matrix(std::istream& is) {
  int p = 0;
  if (!(is >> p) || p <= 0) {
    throw invalid_input("read_matrix: bad dimension header");
  }
  Eigen::MatrixXd m(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) {
      if (!(is >> m(i, j))) {
        throw invalid_input("read_matrix: truncated matrix body");
      }
    }
  }
  return SymmetricMatrix(m);
}

void save_matrix(const std::string& path, const SymmetricMatrix& a) {
  std::ofstream os(path);
  if (!os) throw invalid_input("save_matrix: cannot open " + path);
  write_matrix(os, a);
}

SymmetricMatrix load_matrix(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw invalid_input("load_matrix: cannot open " + path);
  return read_matrix(is);
}

}  // namespace depthcov
