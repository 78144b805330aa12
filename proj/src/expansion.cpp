#include "orbit/expansion.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "orbit/moment.hpp"

namespace orbit {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// ThetaHomBasis

ThetaHomBasis::ThetaHomBasis(AlgebraPtr alg)
    : alg_(std::move(alg)), p_cols_(alg_->p_basis().cols()) {}

Eigen::VectorXd ThetaHomBasis::to_coords(const SlHom& h) const {
  const int d = alg_->dim();
  Eigen::VectorXd x(d + p_cols_);
  x.head(d) = h.val_e().re();
  x.tail(p_cols_) = alg_->p_basis().transpose() * h.val_h().re();
  return x;
}

SlHom ThetaHomBasis::from_coords(const Eigen::VectorXd& x) const {
  const int d = alg_->dim();
  GVector e = GVector::from_real(alg_, x.head(d));
  GVector h = GVector::from_real(alg_, alg_->p_basis() * x.tail(p_cols_));
  return SlHom(e, -e.theta(), h);
}

Eigen::MatrixXd l_operator(const SlHom& phi0) {
  ThetaHomBasis basis(phi0.algebra());
  const int n = basis.size();
  Eigen::MatrixXd l(n, n);
  for (int c = 0; c < n; ++c) {
    const SlHom t = basis.from_coords(Eigen::VectorXd::Unit(n, c));
    l.col(c) = basis.to_coords(q_pairing(phi0, t));
  }
  return l;
}

// ---------------------------------------------------------------------------
// Series evaluation

SlHom evaluate_series(const ExpansionSeries& s, double t) {
  if (t <= 0.0) throw InvalidParameterError("evaluate_series: t must be positive");
  SlHom acc = (1.0 / t) * s.phi0;
  for (int k = 2; k <= s.order; ++k)
    acc += std::pow(t, -1.0 - 0.5 * k) * s.coeffs[static_cast<size_t>(k)];
  return acc;
}

SlHom evaluate_series_derivative(const ExpansionSeries& s, double t) {
  if (t <= 0.0) throw InvalidParameterError("evaluate_series_derivative: t > 0 required");
  SlHom acc = (-1.0 / (t * t)) * s.phi0;
  for (int k = 2; k <= s.order; ++k)
    acc += (-1.0 - 0.5 * k) * std::pow(t, -2.0 - 0.5 * k) *
           s.coeffs[static_cast<size_t>(k)];
  return acc;
}

double series_ode_residual(const ExpansionSeries& s, double t) {
  const SlHom phi = evaluate_series(s, t);
  return hom_norm(evaluate_series_derivative(s, t) + q_pairing(phi, phi));
}

std::map<int, SlHom> d_a(const std::map<int, SlHom>& free, double a) {
  if (a == 0.0) throw InvalidParameterError("d_a: a must be nonzero");
  std::map<int, SlHom> out;
  for (const auto& [k, hom] : free)
    out.emplace(k, std::pow(std::abs(a), -0.5 * k) * (a < 0 && k % 2 ? -1.0 : 1.0) * hom);
  return out;
}

// ---------------------------------------------------------------------------
// ExpansionWorkspace

ExpansionWorkspace::ExpansionWorkspace(const SlHom& phi0, double tol)
    : phi0_(phi0), iso_(isotypic(phi0, tol)), basis_(phi0.algebra()),
      l_(l_operator(phi0)) {
  Sl2Triple triple{phi0.val_e(), phi0.val_f(), phi0.val_h()};
  if (!triple.is_strictly_normal(std::max(tol, 1e-8)))
    throw ValidationError("ExpansionWorkspace: phi0 must be strictly normal");

  const auto& alg = phi0.algebra();
  const int d = alg->dim();
  const Eigen::MatrixXd p_proj =
      0.5 * (Eigen::MatrixXd::Identity(d, d) - alg->theta_matrix());

  for (int r : iso_.occurring_r()) {
    if (r < 2) continue;
    Eigen::MatrixXd cols(d, iso_.dim_of_r(r));
    int at = 0;
    for (const auto& piece : iso_.pieces())
      if (piece.r == r) {
        cols.middleCols(at, piece.basis.cols()) = piece.basis;
        at += static_cast<int>(piece.basis.cols());
      }
    const Eigen::MatrixXd pxr = alg->inner_orthonormalize(p_proj * cols, 1e-10);
    std::vector<SlHom> dirs;
    for (int c = 0; c < pxr.cols(); ++c) {
      auto [hom, eta] = phi_from_xi(GVector::from_real(alg, pxr.col(c)), phi0_, iso_, r);
      (void)eta;
      dirs.push_back(hom);
    }
    dirs = orthonormalize_homs(dirs, 1e-8);
    if (dirs.empty()) continue;

    Eigen::MatrixXd coords(basis_.size(), dirs.size());
    for (size_t c = 0; c < dirs.size(); ++c)
      coords.col(static_cast<int>(c)) = basis_.to_coords(dirs[c]);
    // The free directions of isotype k span the kernel of 2L - (1 + k/2).
    const Eigen::MatrixXd mk =
        2.0 * l_ - (1.0 + 0.5 * r) * Eigen::MatrixXd::Identity(l_.rows(), l_.cols());
    if ((mk * coords).cwiseAbs().maxCoeff() > 1e-6)
      throw SingularSolveError(
          "ExpansionWorkspace: normal directions miss the expected L-eigenspace");
    normal_by_k_.emplace(r, std::move(dirs));
    normal_coords_.emplace(r, std::move(coords));
  }
}

std::vector<SlHom> ExpansionWorkspace::normal_basis() const {
  std::vector<SlHom> out;
  for (const auto& [k, dirs] : normal_by_k_)
    out.insert(out.end(), dirs.begin(), dirs.end());
  return out;
}

std::vector<int> ExpansionWorkspace::free_isotypes() const {
  std::vector<int> ks;
  for (const auto& [k, dirs] : normal_by_k_)
    if (!dirs.empty()) ks.push_back(k);
  return ks;
}

ExpansionWorkspace::LSpectrum ExpansionWorkspace::l_spectrum() const {
  Eigen::EigenSolver<Eigen::MatrixXd> es(l_);
  LSpectrum out;
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    out.eigenvalues.push_back(es.eigenvalues()[i].real());
  std::sort(out.eigenvalues.begin(), out.eigenvalues.end());
  for (double ev : out.eigenvalues) {
    double best = 1e300;
    for (int q = 1; q <= 4; ++q)
      best = std::min(best, std::abs(ev - std::round(ev * q) / q));
    out.max_rational_distance = std::max(out.max_rational_distance, best);
  }
  return out;
}

ExpansionSeries ExpansionWorkspace::build_series(const std::map<int, SlHom>& free,
                                                 int order) const {
  if (order < 2) throw InvalidParameterError("build_series: order must be >= 2");
  for (const auto& [k, hom] : free) {
    if (k < 2) throw BadFreeDatumError("build_series: free data start at k = 2");
    if (hom_norm(hom) == 0.0) continue;
    if (!normal_by_k_.count(k))
      throw BadFreeDatumError("build_series: isotype " + std::to_string(k) +
                              " carries no free directions");
    if (!hom.is_real(1e-8) || !hom.is_theta_compatible(1e-8))
      throw BadFreeDatumError("build_series: free datum must be real and theta-compatible");
    if (membership_residual(hom, phi0_, k) > 1e-7)
      throw BadFreeDatumError("build_series: free datum fails the diagonal-type test");
  }

  ExpansionSeries s{phi0_, order, free, {}};
  s.coeffs.assign(static_cast<size_t>(order) + 1, SlHom::zero(phi0_.algebra()));
  s.coeffs[0] = phi0_;

  const int n = basis_.size();
  for (int k = 2; k <= order; ++k) {
    SlHom rhs = SlHom::zero(phi0_.algebra());
    for (int l = 2; l <= k - 2; ++l)
      rhs += q_pairing(s.coeffs[static_cast<size_t>(l)], s.coeffs[static_cast<size_t>(k - l)]);
    rhs = -1.0 * rhs;

    SlHom particular = SlHom::zero(phi0_.algebra());
    const Eigen::VectorXd b = basis_.to_coords(rhs);
    if (b.norm() > 0.0) {
      const Eigen::MatrixXd mk =
          2.0 * l_ - (1.0 + 0.5 * k) * Eigen::MatrixXd::Identity(n, n);
      const Eigen::VectorXd x = linalg::min_norm_lsq(mk, b, 1e-8);
      if ((mk * x - b).norm() > 1e-8 * (1.0 + b.norm()))
        throw SingularSolveError("build_series: recursion right-hand side is not in range");
      particular = basis_.from_coords(x);
    }
    auto it = free.find(k);
    s.coeffs[static_cast<size_t>(k)] =
        it == free.end() ? particular : particular + it->second;
  }
  return s;
}

namespace {

SlHom rotate_hom(const Eigen::MatrixXd& r, const SlHom& h) {
  const auto& alg = h.algebra();
  auto rot = [&](const GVector& v) { return GVector(alg, r * v.coeffs()); };
  return SlHom(rot(h.val_e()), rot(h.val_f()), rot(h.val_h()));
}

double series_tail_at(const ExpansionSeries& s, double t) {
  double tail = 0.0;
  for (int k = std::max(2, s.order - 1); k <= s.order; ++k)
    tail += hom_norm(s.coeffs[static_cast<size_t>(k)]) * std::pow(t, -1.0 - 0.5 * k);
  return tail;
}

} // namespace

GVector ExpansionWorkspace::f_eval(const std::map<int, SlHom>& free, int order,
                                   double t_eval) const {
  const ExpansionSeries s = build_series(free, order);
  if (series_tail_at(s, t_eval) > 1e-8 * (1.0 + hom_norm(phi0_) / t_eval))
    throw OutOfRadiusError("f_map: series convergence guard failed");
  if (t_eval == 1.0) return evaluate_series(s, 1.0).val_e();
  // Evaluate where the series converges, then follow the flow back to t = 1.
  const Trajectory back = integrate(evaluate_series(s, t_eval), t_eval, 1.0);
  return back.back().val_e();
}

GVector ExpansionWorkspace::f_map(const std::map<int, SlHom>& free, int order) const {
  return f_eval(free, order, 1.0);
}

ExpansionWorkspace::Inversion ExpansionWorkspace::invert_f(const GVector& point,
                                                           int order) const {
  const auto& alg = phi0_.algebra();
  const int d = alg->dim();
  if (!point.is_real(1e-8)) throw ValidationError("invert_f: point must be real");

  // Rotation alignment: bring the descent core of the point onto phi0(e).
  const DescentResult desc = descend_to_core(point);
  const Eigen::MatrixXd kb = alg->k_basis();
  const int nk = static_cast<int>(kb.cols());
  Eigen::MatrixXd rot = Eigen::MatrixXd::Identity(d, d);
  {
    Eigen::VectorXd target = desc.core.re();
    for (int it = 0; it < 60; ++it) {
      Eigen::VectorXd cur = rot * phi0_.val_e().re();
      if ((cur - target).norm() < 1e-12) break;
      Eigen::MatrixXd jac(d, nk);
      for (int j = 0; j < nk; ++j)
        jac.col(j) = alg->ad_real(kb.col(j)) * cur;
      const Eigen::VectorXd c = linalg::min_norm_lsq(jac, target - cur, 1e-8);
      rot = linalg::expm(alg->ad_real(kb * c)) * rot;
      if (c.norm() < 1e-14) break;
    }
    if ((rot * phi0_.val_e().re() - target).norm() > 1e-9)
      throw NewtonDivergedError("invert_f: cannot align the descent core with phi0");
  }
  const Eigen::MatrixXd rot_inv = rot.inverse();
  const GVector pulled(alg, rot_inv * point.coeffs());

  // Unknowns: kappa coordinates on k modulo the stabilizer, plus free-data
  // coordinates along the normal directions.
  Eigen::MatrixXd br(d, nk);
  for (int j = 0; j < nk; ++j)
    br.col(j) = alg->ad_real(kb.col(j)) * phi0_.val_e().re();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(br, Eigen::ComputeFullV);
  int krank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()[i] > 1e-10 * svd.singularValues()[0]) ++krank;
  const Eigen::MatrixXd kdirs = kb * svd.matrixV().leftCols(krank);

  std::vector<std::pair<int, SlHom>> dirs;  // (isotype, direction)
  for (const auto& [k, list] : normal_by_k_)
    for (const auto& h : list) dirs.emplace_back(k, h);
  const int nd = static_cast<int>(dirs.size());
  const int nu = krank + nd;

  auto assemble_free = [&](const Eigen::VectorXd& u) {
    std::map<int, SlHom> free;
    for (int j = 0; j < nd; ++j) {
      const auto& [k, h] = dirs[static_cast<size_t>(j)];
      auto it = free.find(k);
      if (it == free.end())
        free.emplace(k, u[krank + j] * h);
      else
        it->second += u[krank + j] * h;
    }
    return free;
  };

  // Evaluation time ladder: retreat to larger t when the series guard trips.
  auto evaluate = [&](const Eigen::VectorXd& u) -> Eigen::VectorXd {
    const std::map<int, SlHom> free = assemble_free(u);
    GVector val = GVector::zero(alg);
    bool done = false;
    for (double t_eval : {1.0, 2.0, 4.0, 8.0, 16.0}) {
      try {
        val = f_eval(free, order, t_eval);
        done = true;
        break;
      } catch (const OutOfRadiusError&) {
        continue;
      }
    }
    if (!done) throw OutOfRadiusError("invert_f: series diverges at every trial time");
    const GVector rotated = adjoint_exp(
        GVector::from_real(alg, kdirs * u.head(krank)), val);
    return (rotated - pulled).re();
  };

  Eigen::VectorXd u = Eigen::VectorXd::Zero(nu);
  {
    // Seed the free data with the normal projection of the offset at e.
    Eigen::MatrixXd at_e(d, nd);
    for (int j = 0; j < nd; ++j)
      at_e.col(j) = dirs[static_cast<size_t>(j)].second.val_e().re();
    u.tail(nd) = linalg::min_norm_lsq(at_e, (pulled - GVector(alg, phi0_.val_e().coeffs())).re(), 1e-10);
  }

  double best = evaluate(u).norm();
  const double target = 1e-11 * (1.0 + norm(point));
  int iters = 0;
  for (; iters < 60 && best > target; ++iters) {
    const Eigen::VectorXd g0 = evaluate(u);
    Eigen::MatrixXd jac(d, nu);
    const double fd = 1e-6;
    for (int j = 0; j < nu; ++j) {
      Eigen::VectorXd up = u;
      up[j] += fd;
      jac.col(j) = (evaluate(up) - g0) / fd;
    }
    const Eigen::VectorXd step = linalg::min_norm_lsq(jac, -g0, 1e-10);
    double lambda = 1.0;
    bool improved = false;
    for (int bt = 0; bt < 8; ++bt) {
      const double trial = evaluate(u + lambda * step).norm();
      if (trial < best) {
        u += lambda * step;
        best = trial;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) break;
  }
  if (best > 1e3 * target && best > 1e-8 * (1.0 + norm(point)))
    throw NewtonDivergedError("invert_f: Newton failed to reach tolerance");

  // Report in the original (unrotated) frame.
  const Eigen::MatrixXd r_local = linalg::expm(alg->ad_real(kdirs * u.head(krank)));
  const Eigen::MatrixXd r_full = rot * r_local;
  Inversion out{rotate_hom(r_full, phi0_), {}, best, iters};
  for (const auto& [k, h] : assemble_free(u)) out.free.emplace(k, rotate_hom(r_full, h));
  return out;
}

std::string series_to_json_string(const ExpansionSeries& s) {
  json j;
  j["phi0"] = json::parse(hom_to_json_string(s.phi0));
  j["order"] = s.order;
  json fr = json::array();
  for (const auto& [k, hom] : s.free)
    fr.push_back({{"k", k}, {"hom", json::parse(hom_to_json_string(hom))}});
  j["free"] = fr;
  json cf = json::array();
  for (size_t k = 0; k < s.coeffs.size(); ++k)
    cf.push_back(json::parse(hom_to_json_string(s.coeffs[k])));
  j["coeffs"] = cf;
  return j.dump(2);
}

} // namespace orbit
