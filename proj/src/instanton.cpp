#include "orbit/instanton.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "orbit/ode.hpp"

namespace orbit {

SlHom q_pairing(const SlHom& phi1, const SlHom& phi2) {
  // Evaluate the defining identity on (u,v) = (h,e)/2, (f,h)/2, (e,f).
  const GVector qe = 0.25 * (bracket(phi1.val_h(), phi2.val_e()) -
                             bracket(phi1.val_e(), phi2.val_h()));
  const GVector qf = -0.25 * (bracket(phi1.val_h(), phi2.val_f()) -
                              bracket(phi1.val_f(), phi2.val_h()));
  const GVector qh = 0.5 * (bracket(phi1.val_e(), phi2.val_f()) -
                            bracket(phi1.val_f(), phi2.val_e()));
  return SlHom(qe, qf, qh);
}

bool is_morphism(const SlHom& phi, double tol) {
  const double n = hom_norm(phi);
  if (n <= tol) return false;  // Mor excludes the zero map
  return hom_norm(q_pairing(phi, phi) - phi) <= tol * (1.0 + n);
}

SlHom ode_rhs(const SlHom& phi) {
  const SlHom q = -1.0 * q_pairing(phi, phi);
  // Triple form of the same flow.
  const SlHom triple(-0.5 * bracket(phi.val_h(), phi.val_e()),
                     0.5 * bracket(phi.val_h(), phi.val_f()),
                     -1.0 * bracket(phi.val_e(), phi.val_f()));
  if (hom_norm(q - triple) > 1e-12 * (1.0 + hom_norm(q)))
    throw NumericalError("ode_rhs: Q-pairing and triple forms disagree");
  return q;
}

namespace {

Eigen::VectorXd pack(const SlHom& h) {
  const auto d = h.val_e().coeffs().size();
  Eigen::VectorXd y(6 * d);
  y.segment(0 * d, d) = h.val_e().re();
  y.segment(1 * d, d) = h.val_e().im();
  y.segment(2 * d, d) = h.val_f().re();
  y.segment(3 * d, d) = h.val_f().im();
  y.segment(4 * d, d) = h.val_h().re();
  y.segment(5 * d, d) = h.val_h().im();
  return y;
}

SlHom unpack(const AlgebraPtr& alg, const Eigen::VectorXd& y) {
  const auto d = alg->dim();
  auto part = [&](int block) {
    Eigen::VectorXcd v(d);
    v.real() = y.segment((2 * block + 0) * d, d);
    v.imag() = y.segment((2 * block + 1) * d, d);
    return GVector(alg, v);
  };
  return SlHom(part(0), part(1), part(2));
}

} // namespace

Trajectory integrate(const SlHom& phi_start, double t0, double t1,
                     const IntegrateOptions& opt) {
  if (t0 < 0.0 || t1 < 0.0)
    throw InvalidParameterError("integrate: the flow lives on t >= 0");
  const auto& alg = phi_start.algebra();

  Trajectory traj;
  traj.rtol = opt.rtol;
  traj.atol = opt.atol;

  auto rhs = [&](double, const Eigen::VectorXd& y) {
    return pack(ode_rhs(unpack(alg, y)));
  };

  ode::StepControl ctrl;
  ctrl.rtol = opt.rtol;
  ctrl.atol = opt.atol;

  Eigen::VectorXd y = pack(phi_start);
  auto observe = [&](double t, const Eigen::VectorXd& cur) {
    SlHom h = unpack(alg, cur);
    if (hom_norm(h) > opt.blowup_norm)
      throw BlowUpError("integrate: |Phi| exceeded the blow-up bound");
    traj.t.push_back(t);
    traj.phi.push_back(std::move(h));
  };

  const ode::DriveStatus st = ode::drive(rhs, y, t0, t1, ctrl, opt.max_steps, observe);
  if (st == ode::DriveStatus::step_underflow)
    throw BlowUpError("integrate: step size underflow (initial condition blows up)");
  if (st == ode::DriveStatus::max_steps)
    throw MaxIterationsError("integrate: max step count exceeded");
  traj.accepted_steps = static_cast<int>(traj.t.size()) - 1;
  return traj;
}

SlHom Trajectory::at(double time) const {
  if (phi.empty()) throw InvalidParameterError("Trajectory::at on empty trajectory");
  const bool increasing = t.back() >= t.front();
  auto cmp = [&](double a, double b) { return increasing ? a < b : a > b; };
  if (!cmp(t.front(), time) && t.front() != time)
    return phi.front();
  for (size_t i = 1; i < t.size(); ++i) {
    if (!cmp(t[i], time)) {
      const double span = t[i] - t[i - 1];
      const double w = span == 0.0 ? 0.0 : (time - t[i - 1]) / span;
      return (1.0 - w) * phi[i - 1] + w * phi[i];
    }
  }
  return phi.back();
}

Trajectory c_a(const Trajectory& traj, double a) {
  if (a < 1.0) throw InvalidParameterError("c_a: requires a >= 1");
  if (a == 1.0) return traj;
  Trajectory out = traj;
  for (size_t i = 0; i < traj.t.size(); ++i) {
    out.t[i] = (traj.t[i] + 1.0) / a - 1.0;
    out.phi[i] = a * traj.phi[i];
  }
  return out;
}

SlHom c_a_point(const SlHom& phi_at_zero, double a, const IntegrateOptions& opt) {
  if (a < 1.0) throw InvalidParameterError("c_a_point: requires a >= 1");
  if (a == 1.0) return phi_at_zero;
  const Trajectory traj = integrate(phi_at_zero, 0.0, a - 1.0, opt);
  return a * traj.back();
}

Trajectory scale_flow(const Trajectory& traj, double a) {
  if (a <= 0.0) throw InvalidParameterError("scale_flow: requires a > 0");
  Trajectory out = traj;
  for (size_t i = 0; i < traj.t.size(); ++i) {
    out.t[i] = traj.t[i] / a;
    out.phi[i] = a * traj.phi[i];
  }
  return out;
}

SlHom extract_limit(const Trajectory& traj, double morphism_tol) {
  if (traj.t.size() < 8)
    throw NotConvergedError("extract_limit: too few samples");
  // Use the tail where t is largest.
  std::vector<size_t> idx(traj.t.size());
  for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(),
            [&](size_t a, size_t b) { return traj.t[a] < traj.t[b]; });
  const double t_max = traj.t[idx.back()];
  if (t_max <= 10.0)
    throw NotConvergedError("extract_limit: trajectory does not reach large t");
  // Samples from the top decade of t.
  std::vector<size_t> tail;
  for (size_t i : idx)
    if (traj.t[i] >= 0.3 * t_max) tail.push_back(i);
  if (tail.size() < 8) throw NotConvergedError("extract_limit: too few tail samples");

  // Fit t Phi(t) against the half-integer exponent ladder
  // {1, t^-1, t^-3/2, t^-2, t^-5/2}; the t^-1/2 term is absent.
  const auto& alg = traj.phi.front().algebra();
  const std::vector<double> expo{0.0, -1.0, -1.5, -2.0, -2.5};
  Eigen::MatrixXd design(tail.size(), expo.size());
  for (size_t r = 0; r < tail.size(); ++r)
    for (size_t c = 0; c < expo.size(); ++c)
      design(static_cast<long>(r), static_cast<long>(c)) =
          std::pow(traj.t[tail[r]], expo[c]);
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);

  const int d = alg->dim();
  auto fit_slot = [&](auto getter) {
    Eigen::MatrixXcd rhsm(tail.size(), d);
    for (size_t r = 0; r < tail.size(); ++r) {
      const double tt = traj.t[tail[r]];
      rhsm.row(static_cast<long>(r)) = (tt * getter(traj.phi[tail[r]]).coeffs()).transpose();
    }
    Eigen::MatrixXcd sol(static_cast<long>(expo.size()), d);
    double resid = 0.0;
    for (int c = 0; c < d; ++c) {
      Eigen::VectorXd re = cod.solve(rhsm.col(c).real().eval());
      Eigen::VectorXd im = cod.solve(rhsm.col(c).imag().eval());
      sol.col(c).real() = re;
      sol.col(c).imag() = im;
      resid = std::max(resid, (design * re - rhsm.col(c).real()).cwiseAbs().maxCoeff());
      resid = std::max(resid, (design * im - rhsm.col(c).imag()).cwiseAbs().maxCoeff());
    }
    return std::make_pair(GVector(alg, sol.row(0).transpose().eval()), resid);
  };

  auto [e0, re] = fit_slot([](const SlHom& h) { return h.val_e(); });
  auto [f0, rf] = fit_slot([](const SlHom& h) { return h.val_f(); });
  auto [h0, rh] = fit_slot([](const SlHom& h) { return h.val_h(); });
  const SlHom limit(e0, f0, h0);
  const double fit_residual = std::max({re, rf, rh});
  if (fit_residual > 1e-4 * (1.0 + hom_norm(limit)))
    throw NotConvergedError("extract_limit: tail fit residual too large");
  if (!is_morphism(limit, morphism_tol))
    throw NotConvergedError("extract_limit: limit is not a morphism");
  return limit;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  const auto d = traj.phi.empty() ? 0 : traj.phi.front().val_e().coeffs().size();
  out << "t";
  for (const char* blk : {"e", "f", "h"})
    for (Eigen::Index i = 0; i < d; ++i)
      out << "," << blk << i << "_re," << blk << i << "_im";
  out << "\n";
  out.precision(17);
  for (size_t s = 0; s < traj.t.size(); ++s) {
    out << traj.t[s];
    for (const GVector* v :
         {&traj.phi[s].val_e(), &traj.phi[s].val_f(), &traj.phi[s].val_h()})
      for (Eigen::Index i = 0; i < d; ++i)
        out << "," << v->coeffs()[i].real() << "," << v->coeffs()[i].imag();
    out << "\n";
  }
}

std::string trajectory_manifest_json(const Trajectory& traj) {
  nlohmann::json j;
  j["rtol"] = traj.rtol;
  j["atol"] = traj.atol;
  j["samples"] = traj.t.size();
  j["accepted_steps"] = traj.accepted_steps;
  if (!traj.t.empty()) {
    j["t_first"] = traj.t.front();
    j["t_last"] = traj.t.back();
  }
  return j.dump(2);
}

} // namespace orbit
