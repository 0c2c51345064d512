#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "rnqg/errors.hpp"

namespace rnqg {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Relative asymmetry ||M - M^T||_F / max(1, ||M||_F).
inline double symmetry_defect(const MatrixXd& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

inline bool is_symmetric(const MatrixXd& m, double rel_tol = 1e-12) {
  return symmetry_defect(m) <= rel_tol;
}

inline MatrixXd symmetrized(const MatrixXd& m) {
  return 0.5 * (m + m.transpose());
}

/// Largest real part over the spectrum of a (not necessarily symmetric) matrix.
inline double spectral_abscissa(const MatrixXd& m) {
  Eigen::EigenSolver<MatrixXd> es(m, /*computeEigenvectors=*/false);
  return es.eigenvalues().real().maxCoeff();
}

inline bool is_hurwitz(const MatrixXd& m) { return spectral_abscissa(m) < 0.0; }

/// Smallest eigenvalue of a symmetric matrix (input symmetrized first).
inline double min_symmetric_eigenvalue(const MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(m), Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

inline bool is_psd(const MatrixXd& m, double rel_tol = 1e-10) {
  return min_symmetric_eigenvalue(m) >= -rel_tol * std::max(1.0, m.norm());
}

/// Solves A^T X + X A = W for X by vectorization. Intended for the small
/// state dimensions this library targets; cost is O(n^6).
inline MatrixXd solve_lyapunov(const MatrixXd& a, const MatrixXd& w) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n || w.rows() != n || w.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "solve_lyapunov expects square same-size A, W");
  }
  MatrixXd big = MatrixXd::Zero(n * n, n * n);
  const MatrixXd at = a.transpose();
  // vec(A^T X) = (I (x) A^T) vec(X); vec(X A) = (A^T (x) I) vec(X).
  for (Eigen::Index i = 0; i < n; ++i) {
    big.block(i * n, i * n, n, n) += at;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index k = 0; k < n; ++k) {
        big(j * n + k, i * n + k) += at(j, i);
      }
    }
  }
  Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(w.data(), n * n);
  Eigen::FullPivLU<MatrixXd> lu(big);
  if (!lu.isInvertible()) {
    fail(ErrorCode::IllConditioned, "Lyapunov operator is singular");
  }
  Eigen::VectorXd x = lu.solve(rhs);
  return Eigen::Map<const MatrixXd>(x.data(), n, n);
}

}  // namespace rnqg
