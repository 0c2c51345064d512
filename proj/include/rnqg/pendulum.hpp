#pragma once

// Flywheel inverted pendulum benchmark plant. States are
// (theta, phi, theta_dot, phi_dot): pendulum angle from upright, flywheel
// angle, and their rates. The single input is the flywheel drive torque.

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <utility>

#include "rnqg/errors.hpp"
#include "rnqg/sdc.hpp"

namespace rnqg::pendulum {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// sin(z)/z with the removable singularity filled in; keeps the SDC matrix
/// continuous through theta = 0.
inline double sinc(double z) {
  if (std::abs(z) < 1e-4) {
    const double z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

struct Params {
  double m_p = 0.6;     // pendulum mass, kg
  double m_w = 0.31;    // flywheel mass, kg
  double l_g = 0.10;    // pivot to pendulum CG, m
  double l_e = 0.14;    // elbow length, m
  double i_p = 0.0023;  // pendulum inertia, kg m^2
  double i_w = 0.001;   // flywheel inertia, kg m^2
  double g = 9.81;      // gravity, m/s^2

  void validate() const {
    if (m_p <= 0 || m_w <= 0 || l_g <= 0 || l_e <= 0 || i_p <= 0 || i_w <= 0 || g <= 0) {
      fail(ErrorCode::ConfigError, "pendulum parameters must be strictly positive");
    }
  }
};

/// Derived constants, always recomputed from the parameters.
struct Derived {
  double c_t;  // (m_p l_g + m_w l_e) g, N m
  double i_t;  // m_p l_g^2 + m_w l_e^2 + i_p, kg m^2

  static Derived from(const Params& p) {
    return {(p.m_p * p.l_g + p.m_w * p.l_e) * p.g,
            p.m_p * p.l_g * p.l_g + p.m_w * p.l_e * p.l_e + p.i_p};
  }
};

struct MotorParams {
  double l_m;  // coil inductance, H
  double r_m;  // resistance, ohm
  double k_e;  // back-EMF constant, V s/rad
  double k_t;  // torque constant, N m/A
  double n_g;  // gear ratio

  void validate() const {
    if (l_m <= 0 || r_m <= 0 || k_e <= 0 || k_t <= 0 || n_g <= 0) {
      fail(ErrorCode::ConfigError, "motor parameters must be strictly positive");
    }
  }
};

inline VectorXd dynamics(const VectorXd& x, double torque, const Params& p) {
  const Derived d = Derived::from(p);
  VectorXd dx(4);
  dx(0) = x(2);
  dx(1) = x(3);
  dx(2) = (d.c_t / d.i_t) * std::sin(x(0)) - torque / d.i_t;
  dx(3) = -(d.c_t / d.i_t) * std::sin(x(0)) + torque * (d.i_t + p.i_w) / (p.i_w * d.i_t);
  return dx;
}

/// SDC factorization of the dynamics: sin(theta) = sinc(theta) * theta keeps
/// A continuous at the origin. Output defaults are full state measurement
/// (C = I, D = 0) and a torque-matched disturbance (F = B, G = 0).
inline SdcEvaluation sdc(const VectorXd& x, const Params& p) {
  const Derived d = Derived::from(p);
  SdcEvaluation e;
  e.state = x;
  e.a = MatrixXd::Zero(4, 4);
  e.a(0, 2) = 1.0;
  e.a(1, 3) = 1.0;
  const double k = (d.c_t / d.i_t) * sinc(x(0));
  e.a(2, 0) = k;
  e.a(3, 0) = -k;
  e.b = MatrixXd(4, 1);
  e.b << 0.0, 0.0, -1.0 / d.i_t, (d.i_t + p.i_w) / (p.i_w * d.i_t);
  e.c = MatrixXd::Identity(4, 4);
  e.d = MatrixXd::Zero(4, 1);
  e.f_dist = e.b;
  e.g_dist = MatrixXd::Zero(4, 1);
  return e;
}

/// Total kinetic and potential energy (J).
inline std::pair<double, double> energies(const VectorXd& x, const Params& p) {
  const Derived d = Derived::from(p);
  const double td = x(2), pd = x(3);
  const double kinetic = 0.5 * (d.i_t + p.i_w) * td * td + p.i_w * td * pd + 0.5 * p.i_w * pd * pd;
  const double potential = d.c_t * std::cos(x(0));
  return {kinetic, potential};
}

inline double motor_voltage(double current, double di_dt, double omega_m, const MotorParams& mp) {
  return mp.l_m * di_dt + mp.r_m * current + mp.k_e * omega_m;
}

inline double torque_from_current(double current, const MotorParams& mp) {
  return mp.n_g * mp.k_t * current;
}

inline PlantModel make_plant(const Params& p = {}) {
  p.validate();
  PlantModel plant;
  plant.dim_state = 4;
  plant.dim_input = 1;
  plant.dim_output = 4;
  plant.dim_disturbance = 1;
  plant.dim_process_noise = 1;
  plant.drift = [p](const VectorXd& x) { return dynamics(x, 0.0, p); };
  plant.sdc = [p](const VectorXd& x) { return sdc(x, p); };
  return plant;
}

/// The benchmark's state-dependent weights: Q(x) = diag(1 + (x_i / s_i)^2)
/// with S = I4 on the output. Each state is normalized by the excursion it
/// actually reaches in operation (the flywheel rate runs to hundreds of
/// rad/s while exchanging momentum); without the normalization the rate
/// weights blow up and the 0.01 s sampled loop destabilizes. The input
/// weight is sized against the plant's strong input authority for the same
/// reason.
inline CostWeights benchmark_weights(double gamma1 = 5.0, double gamma2 = 1.0,
                                     double input_weight = 1000.0) {
  CostWeights w;
  w.q_of_x = [](const VectorXd& x) {
    VectorXd scales(4);
    scales << 1.0, std::numbers::pi, 10.0, 1000.0;
    const VectorXd z = x.cwiseQuotient(scales);
    VectorXd diag = VectorXd::Ones(4) + z.cwiseProduct(z);
    return MatrixXd(diag.asDiagonal());
  };
  w.r_of_x = [input_weight](const VectorXd&) {
    return MatrixXd(input_weight * MatrixXd::Identity(1, 1));
  };
  w.s_of_x = [](const VectorXd&) { return MatrixXd::Identity(4, 4); };
  w.gamma1 = gamma1;
  w.gamma2 = gamma2;
  return w;
}

/// Noise intensities for the benchmark: process noise enters through the
/// torque channel (L = sigma_l * B), measurement noise uniformly across the
/// four outputs (H = h_scale * ones).
inline NoiseSpec make_noise_spec(const Params& p, double sigma_l, double h_scale,
                                 double state_noise_std, std::uint64_t seed) {
  NoiseSpec spec;
  const SdcEvaluation e = sdc(VectorXd::Zero(4), p);
  spec.l = sigma_l * e.b;
  spec.h = h_scale * MatrixXd::Ones(4, 1);
  spec.state_noise_std = state_noise_std;
  spec.seed = seed;
  return spec;
}

}  // namespace rnqg::pendulum
