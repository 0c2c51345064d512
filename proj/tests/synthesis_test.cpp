#include "rnqg/synthesis.hpp"

#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <numbers>
#include <random>

#include "rnqg/pendulum.hpp"

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Instance {
  rnqg::SdcEvaluation sdc;
  rnqg::CostWeights weights;
  rnqg::NoiseSpec noise;
};

rnqg::CostWeights constant_weights(const MatrixXd& q, const MatrixXd& r, const MatrixXd& s,
                                   double gamma1, double gamma2) {
  rnqg::CostWeights w;
  w.q_of_x = [q](const VectorXd&) { return q; };
  w.r_of_x = [r](const VectorXd&) { return r; };
  w.s_of_x = [s](const VectorXd&) { return s; };
  w.gamma1 = gamma1;
  w.gamma2 = gamma2;
  return w;
}

MatrixXd random_matrix(std::mt19937_64& gen, int rows, int cols) {
  std::normal_distribution<double> dist(0.0, 1.0);
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = dist(gen);
  return m;
}

MatrixXd random_psd(std::mt19937_64& gen, int n) {
  const MatrixXd m = random_matrix(gen, n, n);
  return m.transpose() * m + 0.1 * MatrixXd::Identity(n, n);
}

Instance random_instance(std::mt19937_64& gen, int n, int m, int r, int qw, int pv,
                         bool zero_f = false) {
  Instance inst;
  inst.sdc.a = random_matrix(gen, n, n);
  inst.sdc.b = random_matrix(gen, n, m);
  inst.sdc.c = random_matrix(gen, r, n);
  inst.sdc.d = random_matrix(gen, r, m);
  inst.sdc.f_dist = zero_f ? MatrixXd::Zero(n, qw) : random_matrix(gen, n, qw);
  inst.sdc.g_dist = random_matrix(gen, r, qw);
  inst.sdc.state = VectorXd::Zero(n);
  inst.weights = constant_weights(random_psd(gen, n), random_psd(gen, m), random_psd(gen, r),
                                  1.0 + std::abs(random_matrix(gen, 1, 1)(0, 0)),
                                  1.0 + std::abs(random_matrix(gen, 1, 1)(0, 0)));
  inst.noise.l = random_matrix(gen, n, pv);
  inst.noise.h = random_matrix(gen, r, pv);
  return inst;
}

// Direct evaluation of the closed-loop cost rate as a scalar, the oracle the
// block form must reproduce.
double cost_rate(const Instance& inst, const MatrixXd& p, const MatrixXd& k, const VectorXd& x,
                 const VectorXd& w, const VectorXd& v) {
  const MatrixXd q = inst.weights.q_of_x(x);
  const MatrixXd rw = inst.weights.r_of_x(x);
  const MatrixXd s = inst.weights.s_of_x(x);
  const VectorXd u = k * x;
  const VectorXd xdot = inst.sdc.a * x + inst.sdc.b * u + inst.sdc.f_dist * w + inst.noise.l * v;
  const VectorXd y = inst.sdc.c * x + inst.sdc.d * u + inst.sdc.g_dist * w + inst.noise.h * v;
  double total = 0.0;
  total += x.dot(p * xdot) + xdot.dot(p * x);
  total += x.dot(q * x) + u.dot(rw * u) + y.dot(s * y);
  total += inst.weights.gamma1 * inst.weights.gamma1 * w.squaredNorm();
  total += inst.weights.gamma2 * inst.weights.gamma2 * v.squaredNorm();
  return total;
}

}  // namespace

TEST(MBlocks, DecoupledLimit) {
  std::mt19937_64 gen(1);
  const int n = 3, m = 2, r = 2, qw = 2, pv = 1;
  Instance inst = random_instance(gen, n, m, r, qw, pv);
  inst.sdc.c = MatrixXd::Zero(r, n);
  inst.sdc.d = MatrixXd::Zero(r, m);
  inst.sdc.g_dist = MatrixXd::Zero(r, qw);
  inst.noise.l = MatrixXd::Zero(n, pv);
  inst.noise.h = MatrixXd::Zero(r, pv);
  const MatrixXd p = random_psd(gen, n);
  const MatrixXd k = MatrixXd::Zero(m, n);

  const auto blocks = rnqg::build_m_blocks(inst.sdc, inst.weights, inst.noise, p, k);
  const MatrixXd q = inst.weights.q_of_x(inst.sdc.state);
  const double g1sq = inst.weights.gamma1 * inst.weights.gamma1;
  const double g2sq = inst.weights.gamma2 * inst.weights.gamma2;
  EXPECT_LT((blocks.m1 - (p * inst.sdc.a + inst.sdc.a.transpose() * p + q)).norm(), 1e-12);
  EXPECT_LT((blocks.m2 - p * inst.sdc.f_dist).norm(), 1e-12);
  EXPECT_LT(blocks.m3.norm(), 1e-15);
  EXPECT_LT((blocks.m4 - g1sq * MatrixXd::Identity(qw, qw)).norm(), 1e-12);
  EXPECT_LT(blocks.m5.norm(), 1e-15);
  EXPECT_LT((blocks.m6 - g2sq * MatrixXd::Identity(pv, pv)).norm(), 1e-12);
}

TEST(MBlocks, ScalarHandEvaluation) {
  // Every matrix is the 1x1 one, both gammas one, P = K = 1. Block values
  // follow by scalar arithmetic:
  //   m1 = 2 + 2 + 1 + 1 + 4, m2 = 1 + 2, m3 = 1 + 2, m4 = 2, m5 = 1, m6 = 2.
  Instance inst;
  const MatrixXd one = MatrixXd::Ones(1, 1);
  inst.sdc.a = one;
  inst.sdc.b = one;
  inst.sdc.c = one;
  inst.sdc.d = one;
  inst.sdc.f_dist = one;
  inst.sdc.g_dist = one;
  inst.sdc.state = VectorXd::Zero(1);
  inst.weights = constant_weights(one, one, one, 1.0, 1.0);
  inst.noise.l = one;
  inst.noise.h = one;

  const auto blocks = rnqg::build_m_blocks(inst.sdc, inst.weights, inst.noise, one, one);
  EXPECT_NEAR(blocks.m1(0, 0), 10.0, 1e-14);
  EXPECT_NEAR(blocks.m2(0, 0), 3.0, 1e-14);
  EXPECT_NEAR(blocks.m3(0, 0), 3.0, 1e-14);
  EXPECT_NEAR(blocks.m4(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(blocks.m5(0, 0), 1.0, 1e-14);
  EXPECT_NEAR(blocks.m6(0, 0), 2.0, 1e-14);
}

TEST(MBlocks, QuadraticFormMatchesCostRate) {
  std::mt19937_64 gen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 2);
    const int r = 1 + static_cast<int>(gen() % 3);
    const int qw = 1 + static_cast<int>(gen() % 2);
    const int pv = 1 + static_cast<int>(gen() % 2);
    const Instance inst = random_instance(gen, n, m, r, qw, pv);
    const MatrixXd p = random_psd(gen, n);
    const MatrixXd k = random_matrix(gen, m, n);
    const auto blocks = rnqg::build_m_blocks(inst.sdc, inst.weights, inst.noise, p, k);

    MatrixXd full(n + qw + pv, n + qw + pv);
    full << blocks.m1, blocks.m2, blocks.m3, blocks.m2.transpose(), blocks.m4, blocks.m5,
        blocks.m3.transpose(), blocks.m5.transpose(), blocks.m6;

    for (int rep = 0; rep < 5; ++rep) {
      const VectorXd x = random_matrix(gen, n, 1);
      const VectorXd w = random_matrix(gen, qw, 1);
      const VectorXd v = random_matrix(gen, pv, 1);
      VectorXd xi(n + qw + pv);
      xi << x, w, v;
      const double via_blocks = xi.dot(full * xi);
      const double direct = cost_rate(inst, p, k, x, w, v);
      EXPECT_NEAR(via_blocks, direct, 1e-10 * (1.0 + std::abs(direct)));
    }
  }
}

TEST(SchurReduce, ShiftedFormStaysNegative) {
  // Shifting the diagonal blocks until the full form is negative definite
  // must leave the twice-reduced block negative semidefinite.
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, m = 2, r = 2, qw = 2, pv = 2;
    const Instance inst = random_instance(gen, n, m, r, qw, pv);
    const MatrixXd p = random_psd(gen, n);
    const MatrixXd k = random_matrix(gen, m, n);
    auto blocks = rnqg::build_m_blocks(inst.sdc, inst.weights, inst.noise, p, k);

    MatrixXd full(n + qw + pv, n + qw + pv);
    full << blocks.m1, blocks.m2, blocks.m3, blocks.m2.transpose(), blocks.m4, blocks.m5,
        blocks.m3.transpose(), blocks.m5.transpose(), blocks.m6;
    const double shift = rnqg::min_symmetric_eigenvalue(-full) < 0
                             ? -rnqg::min_symmetric_eigenvalue(-full) + 1.0
                             : 1.0;
    blocks.m1 -= shift * MatrixXd::Identity(n, n);
    blocks.m4 -= shift * MatrixXd::Identity(qw, qw);
    blocks.m6 -= shift * MatrixXd::Identity(pv, pv);

    const auto reduced = rnqg::schur_reduce(blocks);
    EXPECT_LT(rnqg::spectral_abscissa(rnqg::symmetrized(reduced.nested)), 1e-9);
  }
}

TEST(GammaBlocks, BareStateWeightLimit) {
  // With S = 0 and no noise intensities the gain equation must collapse to
  // the plain Riccati data: gamma1 = PA + A^T P + Q, gamma2 = PB, gamma3 = R,
  // and the Riccati-form blocks to lambda1 = 0, lambda2 = Q,
  // lambda3 = -B R^-1 B^T.
  std::mt19937_64 gen(4);
  const int n = 3, m = 2, r = 2, qw = 2, pv = 1;
  Instance inst = random_instance(gen, n, m, r, qw, pv);
  inst.weights.s_of_x = [r](const VectorXd&) { return MatrixXd::Zero(r, r); };
  inst.noise.l = MatrixXd::Zero(n, pv);
  inst.noise.h = MatrixXd::Zero(r, pv);
  const MatrixXd p = random_psd(gen, n);

  const auto blocks = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);
  const MatrixXd q = inst.weights.q_of_x(inst.sdc.state);
  const MatrixXd rw = inst.weights.r_of_x(inst.sdc.state);
  EXPECT_LT((blocks.gamma1 - (p * inst.sdc.a + inst.sdc.a.transpose() * p + q)).norm(), 1e-10);
  EXPECT_LT((blocks.gamma2 - p * inst.sdc.b).norm(), 1e-10);
  EXPECT_LT((blocks.gamma3 - rw).norm(), 1e-10);
  EXPECT_LT(blocks.lam5.norm(), 1e-12);
  EXPECT_LT(blocks.lambda1.norm(), 1e-10);
  EXPECT_LT((blocks.lambda2 - q).norm(), 1e-10);
  EXPECT_LT((blocks.lambda3 + inst.sdc.b * rw.inverse() * inst.sdc.b.transpose()).norm(), 1e-10);
}

TEST(GammaBlocks, Gamma3IsBareRWithoutCouplings) {
  std::mt19937_64 gen(5);
  const int n = 2, m = 2, r = 2, qw = 1, pv = 1;
  Instance inst = random_instance(gen, n, m, r, qw, pv);
  inst.sdc.d = MatrixXd::Zero(r, m);
  const MatrixXd p = random_psd(gen, n);
  const auto blocks = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);
  EXPECT_LT((blocks.gamma3 - inst.weights.r_of_x(inst.sdc.state)).norm(), 1e-12);
}

TEST(GammaBlocks, CompletingTheSquare) {
  std::mt19937_64 gen(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 2);
    const int r = 1 + static_cast<int>(gen() % 3);
    const Instance inst = random_instance(gen, n, m, r, 2, 1);
    const MatrixXd p = random_psd(gen, n);
    const auto blocks = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);
    const MatrixXd k0 = -blocks.lam2 * blocks.gamma2.transpose();

    for (int rep = 0; rep < 5; ++rep) {
      const MatrixXd k = random_matrix(gen, m, n);
      const MatrixXd lhs = blocks.gamma1 + blocks.gamma2 * k + k.transpose() * blocks.gamma2.transpose() +
                           k.transpose() * blocks.gamma3 * k;
      const MatrixXd rhs = blocks.gamma1 - blocks.gamma2 * blocks.lam2 * blocks.gamma2.transpose() +
                           (k - k0).transpose() * blocks.gamma3 * (k - k0);
      const double scale = 1.0 + blocks.gamma1.norm();
      EXPECT_LT((lhs - rhs).norm(), 1e-10 * scale);
    }
  }
}

TEST(GammaBlocks, ArgminInLoewnerOrder) {
  // For positive definite gamma3 the square-completed form shows K0 is the
  // minimizer: the difference of the quadratic form at any K and at K0 is
  // (K - K0)^T gamma3 (K - K0), which must be PSD.
  std::mt19937_64 gen(7);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3, m = 2;
    const Instance inst = random_instance(gen, n, m, 2, 1, 1);
    const MatrixXd p = random_psd(gen, n);
    const auto blocks = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);
    if (rnqg::min_symmetric_eigenvalue(blocks.gamma3) <= 0) continue;
    const MatrixXd k0 = -blocks.lam2 * blocks.gamma2.transpose();
    const MatrixXd k = random_matrix(gen, m, n);
    auto value_at = [&](const MatrixXd& kk) {
      return MatrixXd(blocks.gamma1 + blocks.gamma2 * kk +
                      kk.transpose() * blocks.gamma2.transpose() +
                      kk.transpose() * blocks.gamma3 * kk);
    };
    const MatrixXd diff = value_at(k) - value_at(k0);
    EXPECT_TRUE(rnqg::is_psd(diff, 1e-9));
    EXPECT_LT((diff - (k - k0).transpose() * blocks.gamma3 * (k - k0)).norm(),
              1e-9 * (1.0 + diff.norm()));
  }
}

TEST(GammaBlocks, RiccatiFormIdentity) {
  // The defining property of the Riccati-form blocks: for every symmetric P,
  // gamma1 - gamma2 gamma3^-1 gamma2^T equals
  // P(A + lambda1) + (A + lambda1)^T P + lambda2 + P lambda3 P.
  std::mt19937_64 gen(8);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 2);
    const int r = 1 + static_cast<int>(gen() % 3);
    const int qw = 1 + static_cast<int>(gen() % 2);
    const int pv = 1 + static_cast<int>(gen() % 2);
    const Instance inst = random_instance(gen, n, m, r, qw, pv);
    const MatrixXd p = rnqg::symmetrized(random_matrix(gen, n, n));

    const auto blocks = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);
    const MatrixXd lhs =
        blocks.gamma1 - blocks.gamma2 * blocks.lam2 * blocks.gamma2.transpose();
    const MatrixXd acl = inst.sdc.a + blocks.lambda1;
    const MatrixXd rhs = p * acl + acl.transpose() * p + blocks.lambda2 + p * blocks.lambda3 * p;
    EXPECT_LT((lhs - rhs).norm(), 1e-9 * (1.0 + lhs.norm()));
  }
}

TEST(GammaBlocks, MatchesSchurReductionWithoutStateDisturbance) {
  // With F = 0 the gain-equation blocks group the twice-reduced M form
  // exactly: gamma1 + gamma2 K + K^T gamma2^T + K^T gamma3 K equals the
  // nested Schur complement for every K.
  std::mt19937_64 gen(9);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const int m = 1 + static_cast<int>(gen() % 2);
    const int r = 1 + static_cast<int>(gen() % 3);
    const int qw = 1 + static_cast<int>(gen() % 2);
    const int pv = 1 + static_cast<int>(gen() % 2);
    const Instance inst = random_instance(gen, n, m, r, qw, pv, /*zero_f=*/true);
    const MatrixXd p = random_psd(gen, n);
    const auto gamma = rnqg::build_gamma_blocks(inst.sdc, inst.weights, inst.noise, p);

    for (int rep = 0; rep < 3; ++rep) {
      const MatrixXd k = random_matrix(gen, m, n);
      const auto mblocks = rnqg::build_m_blocks(inst.sdc, inst.weights, inst.noise, p, k);
      const auto reduced = rnqg::schur_reduce(mblocks);
      const MatrixXd grouped = gamma.gamma1 + gamma.gamma2 * k +
                               k.transpose() * gamma.gamma2.transpose() +
                               k.transpose() * gamma.gamma3 * k;
      EXPECT_LT((grouped - reduced.nested).norm(), 1e-9 * (1.0 + reduced.nested.norm()));
    }
  }
}

TEST(SdreGain, DoubleIntegrator) {
  rnqg::SdcEvaluation sdc;
  sdc.a = MatrixXd(2, 2);
  sdc.a << 0, 1, 0, 0;
  sdc.b = MatrixXd(2, 1);
  sdc.b << 0, 1;
  sdc.c = MatrixXd::Identity(2, 2);
  sdc.d = MatrixXd::Zero(2, 1);
  sdc.f_dist = sdc.b;
  sdc.g_dist = MatrixXd::Zero(2, 1);
  sdc.state = VectorXd::Zero(2);
  const auto w = constant_weights(MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1),
                                  MatrixXd::Identity(2, 2), 5.0, 5.0);
  const auto sol = rnqg::sdre_gain(sdc, w);
  MatrixXd k_exact(1, 2);
  k_exact << -1.0, -std::sqrt(3.0);
  EXPECT_LT((sol.k - k_exact).norm(), 1e-9);
  EXPECT_TRUE(sol.diagnostics.closed_loop_stable);
}

TEST(SdreGain, HurwitzZeroWeight) {
  rnqg::SdcEvaluation sdc;
  sdc.a = -2.0 * MatrixXd::Identity(3, 3);
  sdc.b = MatrixXd::Ones(3, 1);
  sdc.c = MatrixXd::Identity(3, 3);
  sdc.d = MatrixXd::Zero(3, 1);
  sdc.f_dist = sdc.b;
  sdc.g_dist = MatrixXd::Zero(3, 1);
  sdc.state = VectorXd::Zero(3);
  const auto w = constant_weights(MatrixXd::Zero(3, 3), MatrixXd::Identity(1, 1),
                                  MatrixXd::Zero(3, 3), 5.0, 5.0);
  const auto sol = rnqg::sdre_gain(sdc, w);
  EXPECT_LT(sol.p.norm(), 1e-10);
  EXPECT_LT(sol.k.norm(), 1e-10);
}

TEST(SdreGain, PendulumBenchmarkState) {
  const rnqg::pendulum::Params params;
  VectorXd x0(4);
  x0 << 20.0 * std::numbers::pi / 180.0, 0.0, 0.01, 0.0;
  const auto sdc = rnqg::pendulum::sdc(x0, params);
  const auto w = rnqg::pendulum::benchmark_weights();
  const auto sol = rnqg::sdre_gain(sdc, w);
  EXPECT_TRUE(sol.k.allFinite());
  EXPECT_TRUE(sol.diagnostics.closed_loop_stable);
  EXPECT_LT(sol.diagnostics.closed_loop_abscissa, 0.0);
  // Independent residual check of the solved equation at this state.
  const MatrixXd q = w.q_of_x(x0);
  const MatrixXd r = w.r_of_x(x0);
  const MatrixXd lhs = sdc.a.transpose() * sol.p + sol.p * sdc.a -
                       sol.p * sdc.b * r.inverse() * sdc.b.transpose() * sol.p + q;
  EXPECT_LT(lhs.norm(), 1e-7 * (1.0 + sol.p.norm()));
}

TEST(H2HinfGain, OutputWeightOnlyReduction) {
  // G = 0, D = 0: the scheme is the SDRE gain computed with Q + C^T S C.
  std::mt19937_64 gen(10);
  const int n = 3, m = 1, r = 2;
  Instance inst = random_instance(gen, n, m, r, 1, 1);
  inst.sdc.g_dist = MatrixXd::Zero(r, 1);
  inst.sdc.d = MatrixXd::Zero(r, m);
  const auto sol = rnqg::h2hinf_gain(inst.sdc, inst.weights);

  const MatrixXd q = inst.weights.q_of_x(inst.sdc.state);
  const MatrixXd s = inst.weights.s_of_x(inst.sdc.state);
  const MatrixXd q_aug = q + inst.sdc.c.transpose() * s * inst.sdc.c;
  auto aug_weights = inst.weights;
  aug_weights.q_of_x = [q_aug](const VectorXd&) { return q_aug; };
  const auto oracle = rnqg::sdre_gain(inst.sdc, aug_weights);
  EXPECT_LT((sol.k - oracle.k).norm(), 1e-8 * (1.0 + oracle.k.norm()));
  EXPECT_LT((sol.p - oracle.p).norm(), 1e-8 * (1.0 + oracle.p.norm()));
}

TEST(H2HinfGain, LargeGamma1Limit) {
  // gamma1 -> 1e6 with bounded G approaches the gain computed with the
  // disturbance-channel coupling removed.
  std::mt19937_64 gen(11);
  const int n = 3, m = 2, r = 2;
  Instance inst = random_instance(gen, n, m, r, 2, 1);
  inst.weights.gamma1 = 1e6;
  const auto sol = rnqg::h2hinf_gain(inst.sdc, inst.weights);

  Instance no_g = inst;
  no_g.sdc.g_dist = MatrixXd::Zero(r, 2);
  const auto limit = rnqg::h2hinf_gain(no_g.sdc, no_g.weights);
  EXPECT_LT((sol.k - limit.k).norm(), 1e-4 * (1.0 + limit.k.norm()));
}

TEST(ReductionChain, PendulumStates) {
  // rnqg with L = H = 0 must equal h2hinf, and h2hinf with S = 0 must equal
  // sdre, state by state.
  const rnqg::pendulum::Params params;
  const auto weights = rnqg::pendulum::benchmark_weights();
  rnqg::NoiseSpec no_noise;
  no_noise.l = MatrixXd::Zero(4, 1);
  no_noise.h = MatrixXd::Zero(4, 1);

  auto s_zero = weights;
  s_zero.s_of_x = [](const VectorXd&) { return MatrixXd::Zero(4, 4); };

  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> angle(-std::numbers::pi / 3, std::numbers::pi / 3);
  std::uniform_real_distribution<double> rate(-3.0, 3.0);
  for (int i = 0; i < 100; ++i) {
    VectorXd x(4);
    x << angle(gen), angle(gen), rate(gen), rate(gen);
    const auto sdc = rnqg::pendulum::sdc(x, params);

    const auto rnqg_sol = rnqg::rnqg_gain(sdc, weights, no_noise);
    const auto h2_sol = rnqg::h2hinf_gain(sdc, weights);
    EXPECT_LT((rnqg_sol.k - h2_sol.k).norm(), 1e-9 * (1.0 + h2_sol.k.norm()));

    const auto h2_szero = rnqg::h2hinf_gain(sdc, s_zero);
    const auto sdre_sol = rnqg::sdre_gain(sdc, s_zero);
    EXPECT_LT((h2_szero.k - sdre_sol.k).norm(), 1e-9 * (1.0 + sdre_sol.k.norm()));
  }
}

TEST(RnqgGain, NoCouplingCollapsesToSdre) {
  // L = H = 0 together with G = D = 0 and S = 0 leaves the plain SDRE data.
  std::mt19937_64 gen(13);
  const int n = 3, m = 1;
  Instance inst = random_instance(gen, n, m, 2, 1, 1);
  inst.sdc.g_dist = MatrixXd::Zero(2, 1);
  inst.sdc.d = MatrixXd::Zero(2, m);
  inst.weights.s_of_x = [](const VectorXd&) { return MatrixXd::Zero(2, 2); };
  inst.noise.l = MatrixXd::Zero(n, 1);
  inst.noise.h = MatrixXd::Zero(2, 1);

  const auto robust = rnqg::rnqg_gain(inst.sdc, inst.weights, inst.noise);
  const auto plain = rnqg::sdre_gain(inst.sdc, inst.weights);
  EXPECT_LT((robust.k - plain.k).norm(), 1e-9 * (1.0 + plain.k.norm()));
  EXPECT_EQ(robust.diagnostics.solve_path, "generalized-care");
  EXPECT_LT(robust.diagnostics.gain_equation_residual, 1e-7 * (1.0 + robust.p.norm()));
}

TEST(RnqgGain, ZeroInputMapGivesZeroGain) {
  rnqg::SdcEvaluation sdc;
  sdc.a = -MatrixXd::Identity(2, 2);
  sdc.b = MatrixXd::Zero(2, 1);
  sdc.c = MatrixXd::Zero(2, 2);
  sdc.d = MatrixXd::Zero(2, 1);
  sdc.f_dist = MatrixXd::Zero(2, 1);
  sdc.g_dist = MatrixXd::Zero(2, 1);
  sdc.state = VectorXd::Zero(2);
  const auto w = constant_weights(MatrixXd::Identity(2, 2), MatrixXd::Identity(1, 1),
                                  MatrixXd::Zero(2, 2), 5.0, 5.0);
  rnqg::NoiseSpec noise;
  noise.l = MatrixXd::Zero(2, 1);
  noise.h = MatrixXd::Zero(2, 1);
  const auto sol = rnqg::rnqg_gain(sdc, w, noise);
  EXPECT_LT(sol.k.norm(), 1e-12);
}

TEST(RnqgGain, RespondsToNoiseIntensities) {
  // Nonzero L and H must move the gain away from the noise-free solution.
  const rnqg::pendulum::Params params;
  const auto weights = rnqg::pendulum::benchmark_weights(5.0, 1.0);
  const auto noise = rnqg::pendulum::make_noise_spec(params, 1.0, 0.1, 0.04, 1);
  VectorXd x(4);
  x << 0.2, 0.0, 0.1, 0.0;
  const auto sdc = rnqg::pendulum::sdc(x, params);
  const auto with_noise = rnqg::rnqg_gain(sdc, weights, noise);
  const auto without = rnqg::h2hinf_gain(sdc, weights);
  EXPECT_GT((with_noise.k - without.k).norm(), 1e-6 * without.k.norm());
  EXPECT_TRUE(with_noise.diagnostics.closed_loop_stable);
}
