#include "orbit/sekiguchi.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace orbit {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

SlHom morphism_from_gr_core(const GVector& nu, double tol) {
  if (nu.is_zero()) throw ZeroElementError("morphism_from_gr_core: nu = 0");
  if (!nu.real_part().is_zero(tol * (1.0 + norm(nu))))
    throw ValidationError("morphism_from_gr_core: nu must lie in i g_R");
  const GVector zeta = nu.imag_part();
  const Sl2Triple triple = strictly_normal_from_critical(zeta, tol);
  return SlHom::from_triple(triple);
}

SlHom morphism_from_p_core(const GVector& zeta, double tol) {
  if (zeta.is_zero()) throw ZeroElementError("morphism_from_p_core: zeta = 0");
  if (!zeta.is_p_valued(tol))
    throw NotInPError("morphism_from_p_core: theta zeta != -zeta");
  const Criticality crit = is_critical(zeta, tol);
  if (!crit.critical)
    throw NotCriticalError("morphism_from_p_core: zeta is not a critical point");
  const double c = std::sqrt(2.0 / (-crit.a));

  // Strictly normal triple for the K-action; tau plays the role of theta.
  const GVector E = c * zeta;
  const GVector F = -E.tau();
  const GVector H = -bracket(E, E.tau());
  {
    const double res = std::max({norm(bracket(H, E) - 2.0 * E),
                                 norm(bracket(H, F) + 2.0 * F),
                                 norm(bracket(E, F) - H)});
    if (res > std::max(tol, 1e-7) * (1.0 + norm(E)))
      throw NotCriticalError("morphism_from_p_core: triple relations fail");
  }

  // x = (h + ie + if)/2 is the matching nilpotent inside s; its own triple is
  // (x, conj x, [x, conj x]). The morphism sends that triple to (E, F, H).
  Eigen::Matrix3cd basis_change;  // columns: coordinates in (e,f,h)
  basis_change.col(0) << 0.5 * kI, 0.5 * kI, 0.5;
  basis_change.col(1) << -0.5 * kI, -0.5 * kI, 0.5;
  basis_change.col(2) << -kI, kI, 0.0;
  const Eigen::Matrix3cd inv = basis_change.inverse();

  const auto& alg = zeta.algebra();
  const int d = alg->dim();
  Eigen::MatrixXcd known(d, 3);
  known.col(0) = E.coeffs();
  known.col(1) = F.coeffs();
  known.col(2) = H.coeffs();
  const Eigen::MatrixXcd vals = known * inv;

  SlHom phi0(GVector(alg, vals.col(0)), GVector(alg, vals.col(1)),
             GVector(alg, vals.col(2)));
  if (!phi0.is_real(1e-7))
    throw NumericalError("morphism_from_p_core: values failed to be real");
  // Scrub conjugation dust so downstream flags are exact.
  phi0 = SlHom(phi0.val_e().real_part(), phi0.val_f().real_part(),
               phi0.val_h().real_part());
  if (phi0.morphism_residual() > 1e-7 * (1.0 + hom_norm(phi0)) ||
      !phi0.is_theta_compatible(1e-7))
    throw NumericalError("morphism_from_p_core: result is not a strict morphism");
  return phi0;
}

GVector sekiguchi_partner(const GVector& x, PartnerDirection direction,
                          const DescentOptions& opt) {
  if (direction == PartnerDirection::gr_to_p) {
    if (!x.real_part().is_zero(1e-8 * (1.0 + norm(x))))
      throw ValidationError("sekiguchi_partner: element must lie in i g_R");
    const DescentResult res = descend_to_core(x, opt);
    const SlHom phi0 = morphism_from_gr_core(res.core);
    return phi0.apply(0.5 * kI, 0.5 * kI, 0.5);
  }
  if (!x.is_p_valued(1e-8))
    throw NotInPError("sekiguchi_partner: element must lie in p");
  const DescentResult res = descend_to_core(x, opt);
  const SlHom phi0 = morphism_from_p_core(res.core);
  return kI * phi0.val_e();
}

GVector deformation_flow(const GVector& zeta, double t) {
  return adjoint_exp(t * zeta.real_part(), zeta);
}

double solve_s_of_t(double t) {
  if (t < 0.0) throw InvalidParameterError("solve_s_of_t: t must be >= 0");
  if (t == 0.0) return 1.0;
  auto g = [&](double s) { return s * std::exp(2.0 * s * t) - 1.0; };
  double lo = 0.0, hi = 1.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

std::vector<ProbeRow> convergence_probe(const SlHom& phi0,
                                        const std::vector<double>& t_grid) {
  const GVector target = kI * phi0.val_e();
  std::vector<ProbeRow> rows;
  for (double t : t_grid) {
    const double s = solve_s_of_t(t);
    const GVector nu_t = s * phi0.apply(kI, kI, 1.0);
    const GVector moved = deformation_flow(nu_t, t);
    ProbeRow row;
    row.t = t;
    row.s = s;
    row.distance = norm(moved - target);
    rows.push_back(row);
  }
  for (size_t i = 1; i < rows.size(); ++i) {
    const double ds = std::log(rows[i].s) - std::log(rows[i - 1].s);
    const double dd = std::log(rows[i].distance) - std::log(rows[i - 1].distance);
    rows[i].slope_estimate = ds != 0.0 ? dd / ds : 0.0;
  }
  if (rows.size() > 1) rows[0].slope_estimate = rows[1].slope_estimate;
  return rows;
}

void write_probe_csv(const std::vector<ProbeRow>& rows, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "t,s,distance,slope_estimate\n";
  out.precision(17);
  for (const auto& r : rows)
    out << r.t << "," << r.s << "," << r.distance << "," << r.slope_estimate << "\n";
}

NormalSlice normal_slice(const GVector& nu, const SlHom& phi0,
                         const IsotypicDecomposition& iso, double a) {
  if (a <= 0.0) throw InvalidParameterError("normal_slice: radius must be positive");
  if (norm(nu - kI * phi0.val_e()) > 1e-7 * (1.0 + norm(nu)))
    throw ValidationError("normal_slice: nu must equal i phi0(e)");
  const Criticality crit = is_critical(nu, 1e-8);
  if (!crit.critical) throw NotCriticalError("normal_slice: nu must be critical");
  const auto& alg = nu.algebra();
  int cols = 0;
  for (const auto& p : iso.pieces())
    if (p.r >= 1 && p.l < p.r) cols += static_cast<int>(p.basis.cols());
  Eigen::MatrixXd q(alg->dim(), cols);
  int at = 0;
  for (const auto& p : iso.pieces())
    if (p.r >= 1 && p.l < p.r) {
      q.middleCols(at, p.basis.cols()) = p.basis;
      at += static_cast<int>(p.basis.cols());
    }
  return {nu, a, q};
}

std::optional<GVector> slice_hit_test(const NormalSlice& slice, const GVector& point,
                                      double tol) {
  const auto& alg = slice.nu.algebra();
  const int nc = static_cast<int>(slice.q_basis.cols());

  auto residual = [&](const Eigen::VectorXd& c) -> Eigen::VectorXd {
    const GVector xi = GVector::from_real(alg, slice.q_basis * c);
    const GVector moved = adjoint_exp(kI * xi, slice.nu);
    Eigen::VectorXd r(2 * alg->dim());
    r.head(alg->dim()) = (moved - point).re();
    r.tail(alg->dim()) = (moved - point).im();
    return r;
  };

  Eigen::VectorXd c = Eigen::VectorXd::Zero(nc);
  double best = residual(c).norm();
  const double target = tol * (1.0 + norm(point));
  for (int it = 0; it < 50 && best > target; ++it) {
    const Eigen::VectorXd g0 = residual(c);
    Eigen::MatrixXd jac(g0.size(), nc);
    const double fd = 1e-7;
    for (int j = 0; j < nc; ++j) {
      Eigen::VectorXd cp = c;
      cp[j] += fd;
      jac.col(j) = (residual(cp) - g0) / fd;
    }
    const Eigen::VectorXd step = linalg::min_norm_lsq(jac, -g0, 1e-10);
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 10; ++bt) {
      const double trial = residual(c + lambda * step).norm();
      if (trial < best) {
        c += lambda * step;
        best = trial;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;  // counts as a miss
  }
  if (best > target) return std::nullopt;
  const GVector xi = GVector::from_real(alg, slice.q_basis * c);
  if (norm(xi) >= slice.radius) return std::nullopt;
  return xi;
}

bool same_h_spectrum(const Sl2Triple& a, const Sl2Triple& b, double tol) {
  auto spectrum = [](const Sl2Triple& t) {
    const Eigen::MatrixXd ad = t.h.algebra()->ad_real(t.h.re());
    Eigen::EigenSolver<Eigen::MatrixXd> es(ad);
    std::vector<double> ev(static_cast<size_t>(es.eigenvalues().size()));
    for (size_t i = 0; i < ev.size(); ++i)
      ev[i] = es.eigenvalues()[static_cast<long>(i)].real();
    std::sort(ev.begin(), ev.end());
    return ev;
  };
  const auto sa = spectrum(a);
  const auto sb = spectrum(b);
  if (sa.size() != sb.size()) return false;
  for (size_t i = 0; i < sa.size(); ++i)
    if (std::abs(sa[i] - sb[i]) > tol) return false;
  return true;
}

} // namespace orbit
