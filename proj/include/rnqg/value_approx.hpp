#pragma once

// Offline training of the polynomial value-function approximation and the
// fast online controller it induces.
//
// The backward recursion fits, for k = N down to 0,
//
//   W_k^T Y(x) = Theta(x, u) + W_{k+1}^T Y(x')
//
// over eta sampled states by least squares, where x' is one discrete step of
// the plant. In drift-only mode the step follows the uncontrolled drift and
// Theta is evaluated at u = 0. In greedy mode u is the small-step minimizer
// of the bracket, u = -(2 s R)^-1 B^T grad V_{k+1}, with s the stage-cost
// scale; the step then follows the controlled dynamics.
//
// The online law is u(x) = -R(x)^-1 B(x)^T grad V(x). Note the conventions:
// with stage weights (Q, R) this law carries twice the LQR magnitude of the
// trained value function (same direction); with stage scale 0.5 it
// reproduces the exact-design feedback. The benchmark presets use 0.5.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rnqg/basis.hpp"
#include "rnqg/errors.hpp"
#include "rnqg/rng.hpp"
#include "rnqg/sdc.hpp"

namespace rnqg {

/// Quadratic stage cost Theta(x, u) = scale * (x^T Q x + u^T R u) * dt.
struct StageCost {
  std::function<MatrixXd(const VectorXd&)> q_of_x;
  std::function<MatrixXd(const VectorXd&)> r_of_x;
  double dt = 0.01;
  double scale = 1.0;

  double theta(const VectorXd& x, const VectorXd& u) const {
    return scale * (x.dot(q_of_x(x) * x) + u.dot(r_of_x(x) * u)) * dt;
  }
};

enum class TrainingMode { DriftOnly, Greedy };

struct TrainingDomain {
  VectorXd lower;
  VectorXd upper;
};

struct WeightSchedule {
  BasisSpec basis;
  std::vector<VectorXd> weights_by_step;  // index k in [0, N]; entry k is W_k
  int horizon = 0;                        // N
  TrainingDomain domain;
  int eta = 0;
  std::uint64_t seed = 0;
  TrainingMode mode = TrainingMode::Greedy;
  double dt = 0.01;
  double stage_scale = 1.0;
  bool converged = false;
  std::vector<double> step_deltas;  // ||W_k - W_{k+1}|| for k = N..0

  const VectorXd& final_weights() const { return weights_by_step.front(); }
};

/// Least-squares fit of W from samples: upsilon is count x eta (one basis
/// column per sample), targets has eta entries. Solved by a column-pivoted
/// QR of the transposed system rather than the normal equations.
inline VectorXd least_squares_fit(const MatrixXd& upsilon, const VectorXd& targets) {
  if (upsilon.cols() != targets.size()) {
    fail(ErrorCode::DimensionMismatch, "least_squares_fit: sample count mismatch");
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qr(upsilon.transpose());
  if (qr.rank() < upsilon.rows()) {
    fail(ErrorCode::RankDeficientBasis,
         "least_squares_fit: basis sample matrix is rank deficient");
  }
  return qr.solve(targets);
}

/// Value and gradient of the trained approximation at a state.
inline std::pair<double, VectorXd> approx_value(const VectorXd& x, const WeightSchedule& sched) {
  const VectorXd& w = sched.final_weights();
  const double value = w.dot(evaluate_basis(sched.basis, x));
  const VectorXd grad = basis_jacobian(sched.basis, x).transpose() * w;
  return {value, grad};
}

/// Online approximate feedback u = -R^-1 B^T grad V.
inline VectorXd approx_control(const VectorXd& x, const WeightSchedule& sched,
                               const MatrixXd& r, const MatrixXd& b) {
  const VectorXd grad = basis_jacobian(sched.basis, x).transpose() * sched.final_weights();
  Eigen::LLT<MatrixXd> llt(symmetrized(r));
  if (llt.info() != Eigen::Success) {
    fail(ErrorCode::SingularR, "approx_control: R is not positive definite");
  }
  return -llt.solve(b.transpose() * grad);
}

inline WeightSchedule train_weights(const PlantModel& plant, const BasisSpec& basis,
                                    const StageCost& cost, int horizon, int eta,
                                    const TrainingDomain& domain, std::uint64_t seed,
                                    TrainingMode mode = TrainingMode::Greedy) {
  const int count = basis.count();
  if (horizon < 1) fail(ErrorCode::ConfigError, "train_weights: horizon must be >= 1");
  if (eta < 2 * count) {
    fail(ErrorCode::ConfigError, "train_weights: eta must be at least 2x the basis count");
  }
  if (domain.lower.size() != plant.dim_state || domain.upper.size() != plant.dim_state) {
    fail(ErrorCode::DimensionMismatch, "train_weights: domain has wrong dimension");
  }

  WeightSchedule sched;
  sched.basis = basis;
  sched.horizon = horizon;
  sched.domain = domain;
  sched.eta = eta;
  sched.seed = seed;
  sched.mode = mode;
  sched.dt = cost.dt;
  sched.stage_scale = cost.scale;
  sched.weights_by_step.assign(horizon + 1, VectorXd::Zero(count));

  const std::uint64_t sample_seed = derive_seed(seed, 0x7261696eull);
  VectorXd w_next = VectorXd::Zero(count);  // W_{N+1}

  std::uint64_t draw = 0;
  for (int k = horizon; k >= 0; --k) {
    MatrixXd upsilon(count, eta);
    VectorXd targets(eta);
    for (int j = 0; j < eta; ++j) {
      VectorXd x(plant.dim_state);
      for (Eigen::Index i = 0; i < plant.dim_state; ++i) {
        const double u01 = counter_uniform(sample_seed, draw++);
        x(i) = domain.lower(i) + u01 * (domain.upper(i) - domain.lower(i));
      }
      const SdcEvaluation e = plant.sdc(x);
      VectorXd u = VectorXd::Zero(plant.dim_input);
      if (mode == TrainingMode::Greedy) {
        const VectorXd grad = basis_jacobian(basis, x).transpose() * w_next;
        const MatrixXd r = cost.r_of_x(x);
        u = -(2.0 * cost.scale * r).ldlt().solve(e.b.transpose() * grad);
      }
      const VectorXd x_next = x + cost.dt * (plant.drift(x) + e.b * u);
      const double target = cost.theta(x, u) + w_next.dot(evaluate_basis(basis, x_next));
      if (!std::isfinite(target)) {
        fail(ErrorCode::NonFiniteTarget, "train_weights: non-finite regression target");
      }
      upsilon.col(j) = evaluate_basis(basis, x);
      targets(j) = target;
    }
    const VectorXd w_k = least_squares_fit(upsilon, targets);
    sched.step_deltas.push_back((w_k - w_next).norm());
    sched.weights_by_step[k] = w_k;
    w_next = w_k;
  }

  const auto& deltas = sched.step_deltas;
  const double w_norm = sched.final_weights().norm();
  sched.converged = deltas.size() >= 3;
  for (std::size_t i = deltas.size() >= 3 ? deltas.size() - 3 : 0; i < deltas.size(); ++i) {
    if (deltas[i] > 1e-6 * (1.0 + w_norm)) sched.converged = false;
  }
  return sched;
}

}  // namespace rnqg
