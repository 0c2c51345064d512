#pragma once

// Continuous algebraic Riccati equation solvers.
//
// The standard problem is  A^T P + P A - P B R^-1 B^T P + Q = 0  with
// Q = Q^T >= 0 and R = R^T > 0. The generalized form used by the robust
// synthesizers is  P Acl + Acl^T P + L2 + P L3 P = 0  with symmetric L2, L3
// and -L3 >= 0; it is reduced to the standard problem through a symmetric
// factorization of -L3.
//
// Method: eigen-decomposition of the 2n x 2n Hamiltonian, extraction of the
// stable invariant subspace, P = X2 X1^-1, followed by residual-driven Newton
// refinement (each step solves one Lyapunov equation). Robust for the small
// state dimensions targeted here.

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <string>

#include "rnqg/errors.hpp"
#include "rnqg/linalg.hpp"

namespace rnqg {

struct CareOptions {
  /// Accept P when the residual norm is below residual_tol * (1 + ||P||_F).
  double residual_tol = 1e-8;
  /// Hamiltonian eigenvalues with |Re| below imag_axis_tol * max(1, ||A||)
  /// indicate there is no stabilizing solution.
  double imag_axis_tol = 1e-9;
  /// Relative symmetry tolerance on Q and R.
  double symmetry_tol = 1e-12;
  /// Eigenvalues of -L3 below -lam3_tol * ||L3|| are an error; small negative
  /// ones above that floor are clamped to zero before factorization.
  double lam3_tol = 1e-10;
  int max_newton_steps = 3;
};

struct CareProblem {
  MatrixXd a;  // n x n state map
  MatrixXd b;  // n x m input map
  MatrixXd q;  // n x n state weight, symmetric PSD
  MatrixXd r;  // m x m input weight, symmetric PD
};

struct GeneralizedCareProblem {
  MatrixXd acl;   // n x n, drift including the Lambda1 shift
  MatrixXd lam2;  // n x n symmetric, constant term
  MatrixXd lam3;  // n x n symmetric, quadratic term (-lam3 PSD for solvability)
};

struct RiccatiSolution {
  MatrixXd p;
  double residual_norm = 0.0;
  bool stable = false;
};

/// Frobenius norm of A^T P + P A - P B R^-1 B^T P + Q.
inline double care_residual(const CareProblem& prob, const MatrixXd& p) {
  const Eigen::Index n = prob.a.rows();
  if (prob.a.cols() != n || prob.b.rows() != n || prob.q.rows() != n ||
      prob.q.cols() != n || prob.r.rows() != prob.b.cols() ||
      prob.r.cols() != prob.b.cols() || p.rows() != n || p.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "care_residual: inconsistent dimensions");
  }
  const MatrixXd g = prob.b * prob.r.ldlt().solve(prob.b.transpose());
  return (prob.a.transpose() * p + p * prob.a - p * g * p + prob.q).norm();
}

/// Frobenius norm of P Acl + Acl^T P + L2 + P L3 P.
inline double care_residual(const GeneralizedCareProblem& prob, const MatrixXd& p) {
  const Eigen::Index n = prob.acl.rows();
  if (prob.acl.cols() != n || prob.lam2.rows() != n || prob.lam2.cols() != n ||
      prob.lam3.rows() != n || prob.lam3.cols() != n || p.rows() != n || p.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "care_residual: inconsistent dimensions");
  }
  return (p * prob.acl + prob.acl.transpose() * p + prob.lam2 + p * prob.lam3 * p).norm();
}

inline RiccatiSolution solve_care(const CareProblem& prob, const CareOptions& opt = {}) {
  const Eigen::Index n = prob.a.rows();
  const Eigen::Index m = prob.b.cols();
  if (prob.a.cols() != n || prob.b.rows() != n || prob.q.rows() != n ||
      prob.q.cols() != n || prob.r.rows() != m || prob.r.cols() != m) {
    fail(ErrorCode::DimensionMismatch, "solve_care: inconsistent dimensions");
  }
  if (!is_symmetric(prob.q, opt.symmetry_tol)) {
    fail(ErrorCode::NonSymmetricInput, "solve_care: Q is not symmetric");
  }
  if (!is_symmetric(prob.r, opt.symmetry_tol)) {
    fail(ErrorCode::NonSymmetricInput, "solve_care: R is not symmetric");
  }
  Eigen::LLT<MatrixXd> r_chol(symmetrized(prob.r));
  if (r_chol.info() != Eigen::Success) {
    fail(ErrorCode::NotPositiveDefinite, "solve_care: R is not positive definite");
  }
  const MatrixXd g = prob.b * r_chol.solve(prob.b.transpose());
  const MatrixXd q = symmetrized(prob.q);

  MatrixXd ham(2 * n, 2 * n);
  ham << prob.a, -g, -q, -prob.a.transpose();

  Eigen::EigenSolver<MatrixXd> es(ham);
  if (es.info() != Eigen::Success) {
    fail(ErrorCode::IllConditioned, "solve_care: Hamiltonian eigen-decomposition failed");
  }
  const double axis_tol = opt.imag_axis_tol * std::max(1.0, prob.a.norm());
  const auto& evals = es.eigenvalues();
  Eigen::MatrixXcd stable_vecs(2 * n, n);
  Eigen::Index taken = 0;
  for (Eigen::Index i = 0; i < 2 * n; ++i) {
    if (std::abs(evals(i).real()) < axis_tol) {
      fail(ErrorCode::NoStabilizingSolution,
           "solve_care: Hamiltonian eigenvalue on the imaginary axis");
    }
    if (evals(i).real() < 0.0) {
      if (taken == n) {
        fail(ErrorCode::NoStabilizingSolution,
             "solve_care: more than n stable Hamiltonian eigenvalues");
      }
      stable_vecs.col(taken++) = es.eigenvectors().col(i);
    }
  }
  if (taken != n) {
    fail(ErrorCode::NoStabilizingSolution,
         "solve_care: stable invariant subspace has wrong dimension");
  }

  const Eigen::MatrixXcd x1 = stable_vecs.topRows(n);
  const Eigen::MatrixXcd x2 = stable_vecs.bottomRows(n);
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(x1);
  if (!lu.isInvertible()) {
    fail(ErrorCode::IllConditioned, "solve_care: stable subspace basis is singular");
  }
  MatrixXd p = (x2 * lu.inverse()).real();
  p = symmetrized(p);

  // Newton refinement: linearizing the residual at P gives a Lyapunov
  // equation in the closed-loop matrix A - G P.
  auto residual_of = [&](const MatrixXd& pp) -> MatrixXd {
    return prob.a.transpose() * pp + pp * prob.a - pp * g * pp + q;
  };
  for (int it = 0; it < opt.max_newton_steps; ++it) {
    const MatrixXd res = residual_of(p);
    if (res.norm() <= 0.1 * opt.residual_tol * (1.0 + p.norm())) break;
    const MatrixXd acl = prob.a - g * p;
    const MatrixXd delta = solve_lyapunov(acl, -res);
    p = symmetrized(p + delta);
  }

  RiccatiSolution sol;
  sol.p = p;
  sol.residual_norm = residual_of(p).norm();
  if (sol.residual_norm > opt.residual_tol * (1.0 + p.norm())) {
    fail(ErrorCode::IllConditioned,
         "solve_care: residual " + std::to_string(sol.residual_norm) +
             " exceeds tolerance after refinement");
  }
  sol.stable = is_hurwitz(prob.a - g * p);
  return sol;
}

/// Maps the generalized equation onto solve_care through Q <- L2 and
/// B R^-1 B^T <- -L3, with B taken from the symmetric eigen-factorization
/// of -L3 (tiny negative eigenvalues clamped, genuinely negative ones
/// rejected). Since P is symmetric the trailing transpose in the quadratic
/// term is immaterial.
inline RiccatiSolution solve_generalized_care(const GeneralizedCareProblem& prob,
                                              const CareOptions& opt = {}) {
  const Eigen::Index n = prob.acl.rows();
  if (prob.acl.cols() != n || prob.lam2.rows() != n || prob.lam2.cols() != n ||
      prob.lam3.rows() != n || prob.lam3.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "solve_generalized_care: inconsistent dimensions");
  }
  if (!is_symmetric(prob.lam2, 1e-10) || !is_symmetric(prob.lam3, 1e-10)) {
    fail(ErrorCode::NonSymmetricInput, "solve_generalized_care: L2 and L3 must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(symmetrized(-prob.lam3));
  const double floor = -opt.lam3_tol * std::max(1.0, prob.lam3.norm());
  VectorXd evals = es.eigenvalues();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (evals(i) < floor) {
      fail(ErrorCode::IndefiniteLam3, "solve_generalized_care: -L3 has a negative eigenvalue");
    }
    evals(i) = std::max(evals(i), 0.0);
  }
  const MatrixXd b = es.eigenvectors() * evals.cwiseSqrt().asDiagonal();

  CareProblem std_prob{prob.acl, b, symmetrized(prob.lam2), MatrixXd::Identity(n, n)};
  RiccatiSolution sol = solve_care(std_prob, opt);
  sol.residual_norm =
      (sol.p * prob.acl + prob.acl.transpose() * sol.p + prob.lam2 + sol.p * prob.lam3 * sol.p)
          .norm();
  sol.stable = is_hurwitz(prob.acl + prob.lam3 * sol.p);
  return sol;
}

}  // namespace rnqg
