#pragma once

#include <map>
#include <random>
#include <vector>

#include "orbit/sl2.hpp"

namespace orbit {

/// Spectral data of a nilpotent zeta = xi + i eta in O cap p: eigenvalues
/// lambda of ad xi, the components zeta_lambda, and the masses
/// a_lambda = |zeta_lambda|^2. The set {lambda} is symmetric and
/// a_lambda = a_{-lambda}.
struct SpectralData {
  std::vector<double> lambda;        ///< sorted ascending
  std::vector<double> a;             ///< masses, aligned with lambda
  std::vector<GVector> zeta_lambda;  ///< components, aligned with lambda
  GVector xi, eta;
};

SpectralData spectral_decompose(const GVector& zeta, double tol = 1e-8);

struct MComponents {
  double m1_sq = 0.0;  ///< |m_1(t)|^2 along the deformation flow
  double m3_sq = 0.0;  ///< |m_3(t)|^2
  double m0_sq = 0.0;  ///< |m(0)|^2
};

/// Closed-form component norms of the moment map along f_t, evaluated
/// stably (largest exponential factored out).
MComponents m_components_spectral(const SpectralData& data, double t);

struct IneqCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
  double log_scale = 0.0;  ///< true sides are lhs*e^{log_scale}, rhs*e^{log_scale}
};

/// The core inequality |m_1(t)|^2 + |m_3(t)|^2 >= |m(0)|^2 for zeta in
/// O cap p, with equality at t = 0.
IneqCheck lemma85_check(const GVector& zeta, double t);
IneqCheck lemma85_check(const SpectralData& data, double t);

/// Scalar reformulation: with h(t) = sum a_lambda e^{lambda t}, checks
/// h'(t)^2 + 2h''(t) + 2h''(0) >= h''(0) h(t)^2 subject to
/// a_lambda = a_{-lambda} > 0, a_0 >= 1, sum = 2, some lambda != 0.
/// Sides are reported scaled by e^{-log_scale}.
IneqCheck inequality_h_form(const std::map<double, double>& a, double t);

/// Power-mean (Chebyshev) step: for masses on lambda != 0 with total in
/// (0,1], sum lambda^{2l+2} a >= (sum lambda^2 a)(sum lambda^{2l} a).
bool chebyshev_check(const std::map<double, double>& a_nonzero, int l);
/// Margin lhs - rhs of the same inequality.
double chebyshev_margin(const std::map<double, double>& a_nonzero, int l);

/// Derivatives h^{(k)}(0) = sum lambda^k a_lambda from mass data.
double h_derivative_at_zero(const std::map<double, double>& a, int k);

/// Random point of the K-orbit through phi0((h+ie+if)/2), drawn as
/// Ad(exp kappa1) Ad(exp i kappa2) seed with kappa in k_R.
GVector random_p_orbit_point(const SlHom& phi0, std::mt19937_64& rng,
                             double kappa_bound = 0.7);

struct SweepReport {
  int samples = 0;
  double min_margin = 0.0;       ///< min over samples of lhs - rhs (scaled)
  int argmin_sample = -1;
  double max_equality_gap = 0.0; ///< max |lhs-rhs| at t = 0
  int disagreements = 0;         ///< spectral vs h-form truth mismatches
  double wall_seconds = 0.0;
  std::uint64_t rng_seed = 0;
};

/// Randomized sweep of the inequality over (zeta, t) samples with
/// t in [0, t_max]; every sample is checked in both the spectral and the
/// h-form shape.
SweepReport lemma85_sweep(const SlHom& phi0, int samples, double t_max,
                          std::uint64_t seed, int jobs = 1);

struct ChebyshevSweepReport {
  int samples = 0;
  double min_margin = 0.0;
  int argmin_sample = -1;
  bool equality_single_pair_ok = false;
  std::uint64_t rng_seed = 0;
};

/// Random admissible mass vectors, l <= l_max; also verifies equality in the
/// single-pair unit-mass configuration.
ChebyshevSweepReport chebyshev_sweep(int samples, int l_max, std::uint64_t seed);

std::string sweep_report_json(const SweepReport& r);
std::string chebyshev_report_json(const ChebyshevSweepReport& r);

} // namespace orbit
