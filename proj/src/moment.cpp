#include "orbit/moment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace orbit {

GVector moment_map(const GVector& zeta) {
  if (zeta.is_zero()) throw ZeroElementError("moment_map: zeta = 0");
  const double n2 = norm_sq(zeta);
  GVector m = (-1.0 / n2) * bracket(zeta, zeta.tau());
  // m lies in i u_R: real part in p, imaginary part in k.
  const double drift = std::max(norm(m.real_part().theta() + m.real_part()),
                                norm(m.imag_part().theta() - m.imag_part()));
  if (drift > 1e-7 * (1.0 + norm(m)))
    throw NumericalError("moment_map: value escaped i u_R");
  return m;
}

double moment_norm_sq(const GVector& zeta) { return norm_sq(moment_map(zeta)); }

Criticality is_critical(const GVector& zeta, double tol) {
  if (zeta.is_zero()) throw ZeroElementError("is_critical: zeta = 0");
  const GVector c = bracket(bracket(zeta, zeta.tau()), zeta);
  const double zn2 = norm_sq(zeta);
  const double a = inner(c, zeta).real() / zn2;
  const double resid = norm(c - a * zeta);
  Criticality out;
  out.a = a;
  const double zn = std::sqrt(zn2);
  out.residual = resid;
  out.critical = resid <= tol * std::max(zn, zn * zn2) && a < 0.0;
  return out;
}

DescentResult descend_to_core(const GVector& seed, const DescentOptions& opt) {
  if (seed.is_zero()) throw ZeroElementError("descend_to_core: seed = 0");
  if (!is_ad_nilpotent(seed, 1e-7))
    throw NotNilpotentError("descend_to_core: seed is not nilpotent");

  GVector zeta = (1.0 / norm(seed)) * seed;
  const double a_tol = std::max(1e-7, opt.crit_tol);

  auto tangent_norm = [&](const GVector& z) {
    GVector v = -2.0 * bracket(moment_map(z), z);
    return norm(v - inner(v, z).real() * z);
  };
  // The flow is the action field of -2 m(zeta); stepping through the group
  // exponential keeps the iterates inside the orbit, and renormalization
  // divides out the radial motion.
  auto flow_step = [&](const GVector& z, double h, const GVector& gen) {
    const GVector moved = adjoint_exp(h * gen, z);
    return (1.0 / norm(moved)) * moved;
  };

  DescentResult res{zeta, 0.0, 0.0, 0, {}};
  auto record = [&](double t, const GVector& z, double mm, double a) {
    if (opt.record_trajectory) res.trajectory.push_back({t, mm, a, z.coeffs()});
  };

  double t = 0.0;
  double h = 5e-2;
  double last_mm = moment_norm_sq(zeta);
  {
    const Criticality c0 = is_critical(zeta, opt.crit_tol);
    record(t, zeta, last_mm, c0.a);
    if (c0.critical && std::abs(c0.a + 2.0) <= a_tol && tangent_norm(zeta) <= opt.grad_tol) {
      res.core = zeta;
      res.m_norm_sq = last_mm;
      res.a = c0.a;
      return res;
    }
  }

  for (int step = 0; step < opt.max_steps; ++step) {
    // Embedded Euler/midpoint pair in Munthe-Kaas form.
    const GVector gen1 = -2.0 * moment_map(zeta);
    const GVector euler = flow_step(zeta, h, gen1);
    const GVector mid = flow_step(zeta, 0.5 * h, gen1);
    const GVector gen2 = -2.0 * moment_map(mid);
    const GVector next = flow_step(zeta, h, gen2);

    const double err = norm(next - euler) / (opt.atol + opt.rtol);
    const double mm = moment_norm_sq(next);
    const bool monotone = mm <= last_mm + 1e-10 * (1.0 + last_mm);
    if (err > 1.0 || !monotone) {
      h = std::max(0.25 * h, h * std::clamp(0.9 / std::sqrt(err), 0.1, 1.0));
      if (h < 1e-14) throw NumericalError("descend_to_core: step underflow");
      continue;
    }
    h = std::min(1.0, h * std::clamp(0.9 / std::sqrt(std::max(err, 1e-10)), 0.2, 4.0));

    t += h;
    zeta = next;
    last_mm = mm;
    ++res.steps;

    if (res.steps % 50 == 0 && nilpotency_residual(zeta) > 1e-6)
      throw LeftOrbitError("descend_to_core: nilpotency degraded, step size too large");

    const Criticality crit = is_critical(zeta, opt.crit_tol);
    record(t, zeta, mm, crit.a);
    if (tangent_norm(zeta) <= opt.grad_tol && crit.critical &&
        std::abs(crit.a + 2.0) <= a_tol) {
      if (nilpotency_residual(zeta) > 1e-6)
        throw LeftOrbitError("descend_to_core: endpoint left the orbit");
      res.core = zeta;
      res.m_norm_sq = mm;
      res.a = crit.a;
      return res;
    }
  }
  throw MaxIterationsError("descend_to_core: no convergence within max_steps");
}

MSplit split_m_123(const GVector& zeta_t, const GVector& xi) {
  if (xi.is_zero()) throw ZeroXiError("split_m_123: xi = 0");
  if (!xi.is_real(1e-9) || !xi.is_p_valued(1e-8))
    throw NotInPError("split_m_123: xi must be real and p-valued");
  const GVector m = moment_map(zeta_t);
  const GVector re = m.real_part();
  const GVector im = m.imag_part();
  const GVector m1 = (inner(re, xi).real() / norm_sq(xi)) * xi;
  const GVector m2 = re - m1;
  const GVector m3 = std::complex<double>(0.0, 1.0) * im;
  return {m1, m2, m3};
}

MSplit split_m_123(const GVector& zeta_t) { return split_m_123(zeta_t, zeta_t.real_part()); }

void write_descent_csv(const DescentResult& r, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,m_norm_sq,a_fit";
  const auto d = r.core.coeffs().size();
  for (Eigen::Index i = 0; i < d; ++i) out << ",re" << i << ",im" << i;
  out << "\n";
  out.precision(17);
  for (const auto& s : r.trajectory) {
    out << s.t << "," << s.m_norm_sq << "," << s.a_fit;
    for (Eigen::Index i = 0; i < d; ++i)
      out << "," << s.coeffs[i].real() << "," << s.coeffs[i].imag();
    out << "\n";
  }
}

} // namespace orbit
