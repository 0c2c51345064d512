#pragma once

// Robust gain synthesis.
//
// The cost rate along closed-loop trajectories is a quadratic form
// xi^T M xi in xi = (x, w, v) (state, disturbance, noise). Eliminating the
// noise channel and then the disturbance channel by Schur complements leaves
// an n x n condition that is quadratic in the feedback gain K:
//
//   Gamma1 + Gamma2 K + K^T Gamma2^T + K^T Gamma3 K = 0.
//
// Completing the square gives the optimal gain K = -Gamma3^-1 Gamma2^T, and
// substituting it back yields a generalized Riccati equation
//
//   P (A + Lambda1) + (A + Lambda1)^T P + Lambda2 + P Lambda3 P = 0
//
// whose blocks are independent of P, so a single generalized CARE solve
// produces the gain. Three schemes share this machinery:
//
//   sdre_gain    - no output weighting, no noise: the plain CARE.
//   h2hinf_gain  - output weighting and output disturbance coupling, no
//                  noise intensities (the L = H = 0 specialization, written
//                  out directly).
//   rnqg_gain    - the full machinery including the process/measurement
//                  noise intensities L and H.
//
// The disturbance-to-state map F couples into the gain equation only through
// the S-weighted output path (G channel); with S = 0 every scheme collapses
// to the plain SDRE gain.

#include <Eigen/Dense>

#include <string>

#include "rnqg/care.hpp"
#include "rnqg/errors.hpp"
#include "rnqg/linalg.hpp"
#include "rnqg/sdc.hpp"

namespace rnqg {

enum class Scheme { SDRE, H2HINF, RNQG };

inline const char* to_string(Scheme s) {
  switch (s) {
    case Scheme::SDRE: return "sdre";
    case Scheme::H2HINF: return "h2hinf";
    case Scheme::RNQG: return "rnqg";
  }
  return "?";
}

/// The blocks of the (x, w, v) quadratic form, steady (P-dot free) version.
struct MBlocks {
  MatrixXd m1;  // n x n
  MatrixXd m2;  // n x q_w
  MatrixXd m3;  // n x p_v
  MatrixXd m4;  // q_w x q_w
  MatrixXd m5;  // q_w x p_v
  MatrixXd m6;  // p_v x p_v
};

inline MBlocks build_m_blocks(const SdcEvaluation& sdc, const CostWeights& w,
                              const NoiseSpec& noise, const MatrixXd& p, const MatrixXd& k) {
  const Eigen::Index n = sdc.a.rows();
  const Eigen::Index m = sdc.b.cols();
  const Eigen::Index r = sdc.c.rows();
  const Eigen::Index qw = sdc.f_dist.cols();
  const Eigen::Index pv = noise.l.cols();
  if (p.rows() != n || p.cols() != n || k.rows() != m || k.cols() != n ||
      sdc.g_dist.rows() != r || sdc.g_dist.cols() != qw || noise.l.rows() != n ||
      noise.h.rows() != r || noise.h.cols() != pv) {
    fail(ErrorCode::DimensionMismatch, "build_m_blocks: inconsistent dimensions");
  }
  if (!is_symmetric(p, 1e-10)) {
    fail(ErrorCode::NonSymmetricInput, "build_m_blocks: P must be symmetric");
  }
  const MatrixXd q = w.q_of_x(sdc.state);
  const MatrixXd rw = w.r_of_x(sdc.state);
  const MatrixXd s = w.s_of_x(sdc.state);

  const MatrixXd acl = sdc.a + sdc.b * k;
  const MatrixXd ccl = sdc.c + sdc.d * k;

  MBlocks out;
  out.m1 = p * acl + acl.transpose() * p + q + k.transpose() * rw * k +
           ccl.transpose() * s * ccl;
  out.m2 = p * sdc.f_dist + ccl.transpose() * s * sdc.g_dist;
  out.m3 = p * noise.l + ccl.transpose() * s * noise.h;
  out.m4 = sdc.g_dist.transpose() * s * sdc.g_dist +
           w.gamma1 * w.gamma1 * MatrixXd::Identity(qw, qw);
  out.m5 = sdc.g_dist.transpose() * s * noise.h;
  out.m6 = noise.h.transpose() * s * noise.h + w.gamma2 * w.gamma2 * MatrixXd::Identity(pv, pv);
  return out;
}

/// Two-level Schur reduction of the M form: first the noise channel (m6),
/// then the disturbance channel.
struct SchurReduced {
  MatrixXd z1;      // n x n
  MatrixXd z2;      // n x q_w
  MatrixXd z3;      // q_w x q_w
  MatrixXd nested;  // z1 - z2 z3^-1 z2^T
};

inline SchurReduced schur_reduce(const MBlocks& m) {
  Eigen::FullPivLU<MatrixXd> lu6(m.m6);
  if (!lu6.isInvertible()) {
    fail(ErrorCode::SingularM6, "schur_reduce: noise-channel block is singular");
  }
  SchurReduced out;
  out.z1 = m.m1 - m.m3 * lu6.solve(m.m3.transpose());
  out.z2 = m.m2 - m.m3 * lu6.solve(m.m5.transpose());
  out.z3 = m.m4 - m.m5 * lu6.solve(m.m5.transpose());
  Eigen::FullPivLU<MatrixXd> lu3(out.z3);
  if (!lu3.isInvertible()) {
    fail(ErrorCode::SingularGamma4Core, "schur_reduce: disturbance-channel core is singular");
  }
  out.nested = out.z1 - out.z2 * lu3.solve(out.z2.transpose());
  return out;
}

/// Gain-equation and Riccati-form blocks. gamma1/gamma2 depend on P; all
/// remaining fields are P-free. Since P is symmetric, P Lambda3 P^T and
/// P Lambda3 P coincide; the solvers use the latter.
struct GammaBlocks {
  MatrixXd gamma1;  // n x n
  MatrixXd gamma2;  // n x m
  MatrixXd gamma3;  // m x m, symmetrized after assembly
  MatrixXd gamma4;  // q_w x q_w, inverse of the disturbance-channel core
  MatrixXd m6;      // p_v x p_v noise-channel core
  // Intermediate factors of the Riccati-form rewrite.
  MatrixXd lam1;  // q_w x m
  MatrixXd lam2;  // m x m, Gamma3^-1
  MatrixXd lam3;  // n x q_w
  MatrixXd lam4;  // n x q_w
  MatrixXd lam5;  // n x m
  MatrixXd lam6;  // n x m
  MatrixXd mu;    // n x m, lam6 + lam3 lam1
  MatrixXd nu;    // n x m, lam5 + lam4 lam1
  // Blocks of the generalized Riccati equation.
  MatrixXd lambda1;  // n x n drift shift
  MatrixXd lambda2;  // n x n constant term
  MatrixXd lambda3;  // n x n quadratic term, -lambda3 PSD by construction
  double gamma3_symmetry_defect = 0.0;
};

namespace detail {

/// Assembles every P-free block of the gain machinery at one state.
inline GammaBlocks assemble_blocks(const SdcEvaluation& sdc, const CostWeights& w,
                                   const NoiseSpec& noise) {
  const Eigen::Index n = sdc.a.rows();
  const Eigen::Index m = sdc.b.cols();
  const Eigen::Index r = sdc.c.rows();
  const Eigen::Index qw = sdc.g_dist.cols();
  const Eigen::Index pv = noise.l.cols();
  if (sdc.b.rows() != n || sdc.c.cols() != n || sdc.d.rows() != r || sdc.d.cols() != m ||
      noise.l.rows() != n || noise.h.rows() != r || noise.h.cols() != pv) {
    fail(ErrorCode::DimensionMismatch, "assemble_blocks: inconsistent dimensions");
  }
  const MatrixXd q = symmetrized(w.q_of_x(sdc.state));
  const MatrixXd rw = symmetrized(w.r_of_x(sdc.state));
  const MatrixXd s = symmetrized(w.s_of_x(sdc.state));
  const MatrixXd& b = sdc.b;
  const MatrixXd& c = sdc.c;
  const MatrixXd& d = sdc.d;
  const MatrixXd& g = sdc.g_dist;
  const MatrixXd& l = noise.l;
  const MatrixXd& h = noise.h;

  GammaBlocks out;
  out.m6 = h.transpose() * s * h + w.gamma2 * w.gamma2 * MatrixXd::Identity(pv, pv);
  Eigen::FullPivLU<MatrixXd> lu6(out.m6);
  if (!lu6.isInvertible()) {
    fail(ErrorCode::SingularM6, "assemble_blocks: noise-channel core is singular");
  }
  const MatrixXd w6 = lu6.inverse();
  const MatrixXd th = h * w6 * h.transpose();  // r x r

  const MatrixXd gamma4_core = g.transpose() * s * g +
                               w.gamma1 * w.gamma1 * MatrixXd::Identity(qw, qw) -
                               g.transpose() * s * th * s * g;
  Eigen::FullPivLU<MatrixXd> lu4(gamma4_core);
  if (!lu4.isInvertible()) {
    fail(ErrorCode::SingularGamma4Core, "assemble_blocks: disturbance-channel core is singular");
  }
  out.gamma4 = lu4.inverse();

  const MatrixXd y = d.transpose() * s * (MatrixXd::Identity(r, r) - th * s) * g;  // m x qw

  out.lam1 = out.gamma4 * y.transpose();
  out.lam3 = l * w6 * h.transpose() * s * g;
  out.lam4 = c.transpose() * s * (th * s - MatrixXd::Identity(r, r)) * g;
  out.lam5 = c.transpose() * s * (MatrixXd::Identity(r, r) - th * s) * d;
  out.lam6 = b - l * w6 * h.transpose() * s * d;

  MatrixXd gamma3 = rw + d.transpose() * s * d - d.transpose() * s * th * s * d -
                    y * out.gamma4 * y.transpose();
  out.gamma3_symmetry_defect = symmetry_defect(gamma3);
  out.gamma3 = symmetrized(gamma3);
  Eigen::FullPivLU<MatrixXd> lu3(out.gamma3);
  if (!lu3.isInvertible()) {
    fail(ErrorCode::SingularR, "assemble_blocks: gain-channel block is singular");
  }
  out.lam2 = lu3.inverse();

  out.mu = out.lam6 + out.lam3 * out.lam1;
  out.nu = out.lam5 + out.lam4 * out.lam1;

  out.lambda1 = -l * w6 * h.transpose() * s * c - out.lam3 * out.gamma4 * out.lam4.transpose() -
                out.mu * out.lam2 * out.nu.transpose();
  out.lambda2 = symmetrized(q + c.transpose() * s * c -
                            c.transpose() * s * th * s * c -
                            out.lam4 * out.gamma4 * out.lam4.transpose() -
                            out.nu * out.lam2 * out.nu.transpose());
  out.lambda3 = symmetrized(-l * w6 * l.transpose() -
                            out.lam3 * out.gamma4 * out.lam3.transpose() -
                            out.mu * out.lam2 * out.mu.transpose());
  return out;
}

}  // namespace detail

/// Populates every block, including the P-dependent gamma1 and gamma2.
inline GammaBlocks build_gamma_blocks(const SdcEvaluation& sdc, const CostWeights& w,
                                      const NoiseSpec& noise, const MatrixXd& p) {
  const Eigen::Index n = sdc.a.rows();
  if (p.rows() != n || p.cols() != n) {
    fail(ErrorCode::DimensionMismatch, "build_gamma_blocks: P has wrong dimensions");
  }
  GammaBlocks blocks = detail::assemble_blocks(sdc, w, noise);
  const MatrixXd q = symmetrized(w.q_of_x(sdc.state));
  const MatrixXd s = symmetrized(w.s_of_x(sdc.state));
  const MatrixXd& c = sdc.c;
  const MatrixXd& l = noise.l;
  const MatrixXd& h = noise.h;

  const MatrixXd w6 = blocks.m6.fullPivLu().inverse();
  const MatrixXd t0 = p * l + c.transpose() * s * h;  // n x pv
  const MatrixXd x = p * blocks.lam3 + blocks.lam4;   // n x qw

  blocks.gamma1 = p * sdc.a + sdc.a.transpose() * p + q + c.transpose() * s * c -
                  t0 * w6 * t0.transpose() - x * blocks.gamma4 * x.transpose();
  // gamma2 = P mu + nu by construction; assembled from the same factors.
  blocks.gamma2 = p * blocks.mu + blocks.nu;
  return blocks;
}

struct GainDiagnostics {
  double riccati_residual = 0.0;        // residual of the solved Riccati equation
  double gain_equation_residual = 0.0;  // ||gamma1 - gamma2 gamma3^-1 gamma2^T|| at P
  double closed_loop_abscissa = 0.0;    // max Re eig(A + B K)
  bool closed_loop_stable = false;
  double gamma3_symmetry_defect = 0.0;
  std::string solve_path;
};

struct GainSolution {
  MatrixXd k;  // m x n feedback gain, u = K x
  MatrixXd p;  // n x n Riccati solution
  Scheme scheme = Scheme::SDRE;
  GainDiagnostics diagnostics;
};

namespace detail {

inline void finish_diagnostics(GainSolution& sol, const SdcEvaluation& sdc) {
  sol.diagnostics.closed_loop_abscissa = spectral_abscissa(sdc.a + sdc.b * sol.k);
  sol.diagnostics.closed_loop_stable = sol.diagnostics.closed_loop_abscissa < 0.0;
}

}  // namespace detail

/// Plain state-dependent Riccati gain: P from the standard CARE at this
/// state, K = -R^-1 B^T P.
inline GainSolution sdre_gain(const SdcEvaluation& sdc, const CostWeights& w,
                              const CareOptions& opt = {}) {
  const MatrixXd q = symmetrized(w.q_of_x(sdc.state));
  const MatrixXd r = symmetrized(w.r_of_x(sdc.state));
  const RiccatiSolution rs = solve_care({sdc.a, sdc.b, q, r}, opt);

  GainSolution sol;
  sol.scheme = Scheme::SDRE;
  sol.p = rs.p;
  sol.k = -r.ldlt().solve(sdc.b.transpose() * rs.p);
  sol.diagnostics.riccati_residual = rs.residual_norm;
  sol.diagnostics.solve_path = "care";
  detail::finish_diagnostics(sol, sdc);
  return sol;
}

/// Disturbance-aware gain without noise intensities: the L = H = 0
/// specialization of the block machinery, written out directly. When
/// eq29_literal_gain is set, the gain formula keeps the transcription used
/// by the corresponding closed-form statement (differing in one S factor);
/// the Riccati solution is shared.
inline GainSolution h2hinf_gain(const SdcEvaluation& sdc, const CostWeights& w,
                                const CareOptions& opt = {}, bool eq29_literal_gain = false) {
  const Eigen::Index r_dim = sdc.c.rows();
  const Eigen::Index qw = sdc.g_dist.cols();
  const MatrixXd q = symmetrized(w.q_of_x(sdc.state));
  const MatrixXd rw = symmetrized(w.r_of_x(sdc.state));
  const MatrixXd s = symmetrized(w.s_of_x(sdc.state));
  const MatrixXd& b = sdc.b;
  const MatrixXd& c = sdc.c;
  const MatrixXd& d = sdc.d;
  const MatrixXd& g = sdc.g_dist;

  const MatrixXd e1_core =
      g.transpose() * s * g + w.gamma1 * w.gamma1 * MatrixXd::Identity(qw, qw);
  Eigen::FullPivLU<MatrixXd> lu(e1_core);
  if (!lu.isInvertible()) {
    fail(ErrorCode::SingularGamma4Core, "h2hinf_gain: disturbance-channel core is singular");
  }
  const MatrixXd e1 = lu.inverse();

  const MatrixXd gamma3 =
      symmetrized(rw + d.transpose() * s * d -
                  d.transpose() * s * g * e1 * g.transpose() * s * d);
  Eigen::FullPivLU<MatrixXd> lu3(gamma3);
  if (!lu3.isInvertible()) {
    fail(ErrorCode::SingularR, "h2hinf_gain: gain-channel block is singular");
  }
  const MatrixXd gamma3_inv = lu3.inverse();

  const MatrixXd nu =
      c.transpose() * s * d - c.transpose() * s * g * e1 * g.transpose() * s * d;
  const MatrixXd& mu = b;

  const MatrixXd lambda1 = -mu * gamma3_inv * nu.transpose();
  const MatrixXd lambda2 =
      symmetrized(q + c.transpose() * s * c - c.transpose() * s * g * e1 * g.transpose() * s * c -
                  nu * gamma3_inv * nu.transpose());
  const MatrixXd lambda3 = symmetrized(-mu * gamma3_inv * mu.transpose());

  const RiccatiSolution rs = solve_generalized_care({sdc.a + lambda1, lambda2, lambda3}, opt);

  GainSolution sol;
  sol.scheme = Scheme::H2HINF;
  sol.p = rs.p;
  if (eq29_literal_gain) {
    const MatrixXd lit_gamma3 = rw - d.transpose() * s * g * e1 * g.transpose() * d +
                                d.transpose() * s * d;
    const MatrixXd lit_gamma2 =
        rs.p * b + c.transpose() * s * d -
        (rs.p * sdc.f_dist + c.transpose() * s * g) * e1 * g.transpose() * s * d;
    sol.k = -lit_gamma3.fullPivLu().solve(lit_gamma2.transpose());
  } else {
    sol.k = -gamma3_inv * (rs.p * mu + nu).transpose();
  }
  sol.diagnostics.riccati_residual = rs.residual_norm;
  sol.diagnostics.solve_path = "generalized-care";
  detail::finish_diagnostics(sol, sdc);
  return sol;
}

/// Full robust gain: noise intensities and the disturbance channel both
/// enter through the block machinery. The Riccati-form blocks carry no P
/// dependence, so one generalized CARE solve is exact; no fixed-point
/// iteration is required.
inline GainSolution rnqg_gain(const SdcEvaluation& sdc, const CostWeights& w,
                              const NoiseSpec& noise, const CareOptions& opt = {}) {
  const GammaBlocks blocks = detail::assemble_blocks(sdc, w, noise);
  const RiccatiSolution rs =
      solve_generalized_care({sdc.a + blocks.lambda1, blocks.lambda2, blocks.lambda3}, opt);

  GainSolution sol;
  sol.scheme = Scheme::RNQG;
  sol.p = rs.p;
  sol.k = -blocks.lam2 * (rs.p * blocks.mu + blocks.nu).transpose();
  sol.diagnostics.riccati_residual = rs.residual_norm;
  sol.diagnostics.gamma3_symmetry_defect = blocks.gamma3_symmetry_defect;
  sol.diagnostics.solve_path = "generalized-care";

  const GammaBlocks full = build_gamma_blocks(sdc, w, noise, rs.p);
  sol.diagnostics.gain_equation_residual =
      (full.gamma1 - full.gamma2 * full.lam2 * full.gamma2.transpose()).norm();
  detail::finish_diagnostics(sol, sdc);
  return sol;
}

}  // namespace rnqg
