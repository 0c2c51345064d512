#pragma once

#include <Eigen/Dense>

namespace rnqg {

enum class Integrator { Euler, RK4 };

/// One explicit Euler step of x' = f(x).
template <typename F>
Eigen::VectorXd euler_step(const F& f, const Eigen::VectorXd& x, double dt) {
  return x + dt * f(x);
}

/// One classical fourth-order Runge-Kutta step of x' = f(x).
template <typename F>
Eigen::VectorXd rk4_step(const F& f, const Eigen::VectorXd& x, double dt) {
  const Eigen::VectorXd k1 = f(x);
  const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = f(x + dt * k3);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

template <typename F>
Eigen::VectorXd integrate_step(Integrator method, const F& f, const Eigen::VectorXd& x,
                               double dt) {
  return method == Integrator::RK4 ? rk4_step(f, x, dt) : euler_step(f, x, dt);
}

}  // namespace rnqg
