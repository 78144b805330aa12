#pragma once

#include <vector>

#include "orbit/sl2.hpp"

namespace orbit {

/// The symmetric pairing on Hom(s,g) obtained by inverting the bracket of s:
/// Q(P1,P2)[u,v] = ([P1 u, P2 v] - [P1 v, P2 u]) / 2. Morphisms are exactly
/// its fixed points Q(P,P) = P. Preserves reality and theta-compatibility.
SlHom q_pairing(const SlHom& phi1, const SlHom& phi2);

/// |Q(Phi,Phi) - Phi| < tol and Phi != 0 (the zero map does not count).
bool is_morphism(const SlHom& phi, double tol = 1e-9);

/// Right-hand side -Q(Phi,Phi) of the instanton flow dPhi/dt = -Q(Phi,Phi).
/// Also evaluated in triple form (2E' = -[H,E], 2F' = [H,F], H' = -[E,F])
/// and cross-checked; disagreement throws NumericalError.
SlHom ode_rhs(const SlHom& phi);

struct IntegrateOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  int max_steps = 200000;
  double blowup_norm = 1e8;  ///< declare blow-up past this |Phi|
};

struct Trajectory {
  std::vector<double> t;
  std::vector<SlHom> phi;
  double rtol = 0.0, atol = 0.0;
  int accepted_steps = 0;

  const SlHom& front() const { return phi.front(); }
  const SlHom& back() const { return phi.back(); }
  /// Linear interpolation in t (samples are dense enough for tests).
  SlHom at(double time) const;
};

/// Adaptive integration of the instanton flow from t0 to t1 (either
/// direction). Samples are recorded at every accepted step. Throws
/// BlowUpError when the step size underflows or |Phi| explodes; bounded
/// trajectories of the flow never do.
Trajectory integrate(const SlHom& phi_start, double t0, double t1,
                     const IntegrateOptions& opt = {});

/// The curve reparametrization (C_a Psi)(t) = a Psi(a(t+1) - 1), a >= 1.
/// Acts on sampled trajectories by exact time remapping.
Trajectory c_a(const Trajectory& traj, double a);

/// C_a applied to initial data: returns a Phi(a-1) obtained by integration.
SlHom c_a_point(const SlHom& phi_at_zero, double a, const IntegrateOptions& opt = {});

/// The scaling action t -> a Phi(a t), a > 0.
Trajectory scale_flow(const Trajectory& traj, double a);

/// Richardson-style extraction of lim t Phi(t) from the tail of a
/// trajectory: fits t Phi(t) = Phi0 + A/t + B t^{-3/2} by least squares.
/// The returned map must pass is_morphism within morphism_tol, else throws
/// NotConvergedError.
SlHom extract_limit(const Trajectory& traj, double morphism_tol = 1e-6);

/// CSV: t, then e/f/h coefficient blocks (re/im interleaved).
void write_trajectory_csv(const Trajectory& traj, const std::string& path);
/// JSON manifest with tolerances and endpoints.
std::string trajectory_manifest_json(const Trajectory& traj);

} // namespace orbit
