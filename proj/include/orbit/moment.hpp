#pragma once

#include <functional>
#include <vector>

#include "orbit/algebra.hpp"

namespace orbit {

/// Ness moment map m(zeta) = -[zeta, theta conj(zeta)] / |zeta|^2.
/// Real input gives a value in p_R; complex input gives a value in i u_R
/// (real part in p_R, imaginary part in k_R). Invariant under scaling by
/// positive reals.
GVector moment_map(const GVector& zeta);

/// |m(zeta)|^2 in the inner product.
double moment_norm_sq(const GVector& zeta);

struct Criticality {
  bool critical = false;
  double a = 0.0;        ///< fitted coefficient in [[z, theta conj z], z] = a z
  double residual = 0.0; ///< relative least-squares residual
};

/// Least-squares test of [[zeta, theta conj(zeta)], zeta] = a zeta with a < 0.
Criticality is_critical(const GVector& zeta, double tol = 1e-9);

struct DescentOptions {
  double grad_tol = 1e-8;   ///< terminal gradient norm on the sphere
  double crit_tol = 1e-8;   ///< tolerance handed to the criticality test
  double rtol = 1e-8;
  double atol = 1e-10;
  int max_steps = 50000;
  bool record_trajectory = false;
};

struct DescentSample {
  double t = 0.0;
  double m_norm_sq = 0.0;
  double a_fit = 0.0;
  Eigen::VectorXcd coeffs;
};

struct DescentResult {
  GVector core;
  double m_norm_sq = 0.0;
  double a = 0.0;
  int steps = 0;
  std::vector<DescentSample> trajectory;  ///< filled when record_trajectory
};

/// Gradient descent of |m|^2 on the unit sphere of the orbit:
/// zeta' = -2 [m(zeta), zeta], projected tangentially and renormalized every
/// step. Stops at a critical point with a = -2. Throws MaxIterationsError or
/// LeftOrbitError (nilpotency drift).
DescentResult descend_to_core(const GVector& seed, const DescentOptions& opt = {});

struct MSplit {
  GVector m1, m2, m3;
};

/// Splits m(zeta_t) = m1 + m2 + m3 with m1 in R.xi, m2 in p_R orthogonal to
/// xi, m3 in i k_R. xi defaults to Re zeta_t.
MSplit split_m_123(const GVector& zeta_t, const GVector& xi);
MSplit split_m_123(const GVector& zeta_t);

/// Writes a descent trajectory as CSV: t, |m|^2, a_fit, then re/im
/// interleaved coefficient columns.
void write_descent_csv(const DescentResult& r, const std::string& path);

} // namespace orbit
