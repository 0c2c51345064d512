#pragma once

// State-dependent-coefficient plant model: everything the synthesizers and
// the simulator consume. All types are immutable value types; the function
// fields must be pure.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rnqg/errors.hpp"
#include "rnqg/linalg.hpp"

namespace rnqg {

/// Snapshot of all coefficient matrices evaluated at one state. The defining
/// property is A(x) * x == drift(x).
struct SdcEvaluation {
  MatrixXd a;       // n x n
  MatrixXd b;       // n x m
  MatrixXd c;       // r x n
  MatrixXd d;       // r x m
  MatrixXd f_dist;  // n x q_w, disturbance into the dynamics
  MatrixXd g_dist;  // r x q_w, disturbance into the output
  VectorXd state;   // the x at which everything above was evaluated
};

/// Noise description: intensity matrices drive the synthesis, the scalar
/// state_noise_std drives the per-state noise injected by the simulator.
struct NoiseSpec {
  MatrixXd l;                    // n x p_v process-noise intensity
  MatrixXd h;                    // r x p_v measurement-noise intensity
  double state_noise_std = 0.0;  // std-dev of injected state noise
  std::uint64_t seed = 0;
};

/// State-dependent cost weights. Q and S must evaluate symmetric PSD, R
/// symmetric PD.
struct CostWeights {
  std::function<MatrixXd(const VectorXd&)> q_of_x;
  std::function<MatrixXd(const VectorXd&)> r_of_x;
  std::function<MatrixXd(const VectorXd&)> s_of_x;
  double gamma1 = 1.0;
  double gamma2 = 1.0;
};

struct PlantModel {
  Eigen::Index dim_state = 0;
  Eigen::Index dim_input = 0;
  Eigen::Index dim_output = 0;
  Eigen::Index dim_disturbance = 0;
  Eigen::Index dim_process_noise = 1;
  std::function<VectorXd(const VectorXd&)> drift;
  std::function<SdcEvaluation(const VectorXd&)> sdc;
};

struct PlantValidationReport {
  double max_defect = 0.0;       // worst ||A(x)x - f(x)|| over the samples
  double max_rel_defect = 0.0;   // same, relative to 1 + ||f(x)||
  bool origin_ok = true;         // f(0) == 0 within 1e-12
  bool factorization_ok = true;  // defect within 1e-10 * (1 + ||f(x)||) everywhere
  std::vector<std::string> weight_violations;

  bool passed() const { return origin_ok && factorization_ok && weight_violations.empty(); }
};

/// Checks the factorization A(x)x == f(x) over the given sample states, the
/// origin condition f(0) == 0, and (when weights are supplied) symmetry and
/// definiteness of Q, R, S at those states.
inline PlantValidationReport validate_plant(const PlantModel& plant,
                                            const std::vector<VectorXd>& samples,
                                            const CostWeights* weights = nullptr) {
  if (samples.empty()) {
    fail(ErrorCode::DimensionMismatch, "validate_plant: samples must be nonempty");
  }
  PlantValidationReport report;

  const VectorXd f0 = plant.drift(VectorXd::Zero(plant.dim_state));
  report.origin_ok = f0.norm() <= 1e-12;

  for (const VectorXd& x : samples) {
    if (x.size() != plant.dim_state) {
      fail(ErrorCode::DimensionMismatch, "validate_plant: sample has wrong dimension");
    }
    const VectorXd f = plant.drift(x);
    const SdcEvaluation e = plant.sdc(x);
    const double defect = (e.a * x - f).norm();
    report.max_defect = std::max(report.max_defect, defect);
    const double rel = defect / (1.0 + f.norm());
    report.max_rel_defect = std::max(report.max_rel_defect, rel);
    if (rel > 1e-10) report.factorization_ok = false;

    if (weights != nullptr) {
      const MatrixXd q = weights->q_of_x(x);
      const MatrixXd r = weights->r_of_x(x);
      const MatrixXd s = weights->s_of_x(x);
      if (!is_symmetric(q, 1e-10) || !is_psd(q)) {
        report.weight_violations.push_back("Q not symmetric PSD at a sample state");
      }
      if (!is_symmetric(r, 1e-10) || min_symmetric_eigenvalue(r) <= 0.0) {
        report.weight_violations.push_back("R not symmetric PD at a sample state");
      }
      if (!is_symmetric(s, 1e-10) || !is_psd(s)) {
        report.weight_violations.push_back("S not symmetric PSD at a sample state");
      }
    }
  }
  return report;
}

}  // namespace rnqg
