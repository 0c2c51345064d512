#pragma once

// Monomial basis over the state variables. Terms have total degree at least
// two: the value function vanishes with zero gradient at the regulation
// target, so constant and linear terms are excluded.

#include <Eigen/Dense>

#include <vector>

#include "rnqg/errors.hpp"

namespace rnqg {

struct BasisSpec {
  int dim = 0;
  int degree = 2;
  std::vector<std::vector<int>> terms;  // multi-indices, graded lexicographic

  int count() const { return static_cast<int>(terms.size()); }

  /// All monomials in `dim` variables with total degree in [2, degree].
  static BasisSpec monomials(int dim, int degree) {
    if (dim < 1 || degree < 2) {
      fail(ErrorCode::ConfigError, "basis requires dim >= 1 and degree >= 2");
    }
    BasisSpec spec;
    spec.dim = dim;
    spec.degree = degree;
    std::vector<int> current(dim, 0);
    for (int total = 2; total <= degree; ++total) {
      enumerate(spec.terms, current, 0, total);
    }
    return spec;
  }

 private:
  static void enumerate(std::vector<std::vector<int>>& out, std::vector<int>& current,
                        int position, int remaining) {
    if (position == static_cast<int>(current.size()) - 1) {
      current[position] = remaining;
      out.push_back(current);
      return;
    }
    for (int use = remaining; use >= 0; --use) {
      current[position] = use;
      enumerate(out, current, position + 1, remaining - use);
    }
    current[position] = 0;
  }
};

inline Eigen::VectorXd evaluate_basis(const BasisSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) {
    fail(ErrorCode::DimensionMismatch, "evaluate_basis: state has wrong dimension");
  }
  Eigen::VectorXd out(spec.count());
  for (int t = 0; t < spec.count(); ++t) {
    double value = 1.0;
    for (int i = 0; i < spec.dim; ++i) {
      for (int e = 0; e < spec.terms[t][i]; ++e) value *= x(i);
    }
    out(t) = value;
  }
  return out;
}

/// Analytic Jacobian of the basis: row t holds the gradient of term t.
inline Eigen::MatrixXd basis_jacobian(const BasisSpec& spec, const Eigen::VectorXd& x) {
  if (x.size() != spec.dim) {
    fail(ErrorCode::DimensionMismatch, "basis_jacobian: state has wrong dimension");
  }
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(spec.count(), spec.dim);
  for (int t = 0; t < spec.count(); ++t) {
    for (int d = 0; d < spec.dim; ++d) {
      const int e_d = spec.terms[t][d];
      if (e_d == 0) continue;
      double value = static_cast<double>(e_d);
      for (int i = 0; i < spec.dim; ++i) {
        const int reps = (i == d) ? spec.terms[t][i] - 1 : spec.terms[t][i];
        for (int e = 0; e < reps; ++e) value *= x(i);
      }
      jac(t, d) = value;
    }
  }
  return jac;
}

}  // namespace rnqg
