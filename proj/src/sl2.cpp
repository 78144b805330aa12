#include "orbit/sl2.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "orbit/moment.hpp"

namespace orbit {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Sl2Triple

double Sl2Triple::relation_residual() const {
  const double r1 = norm(bracket(h, e) - 2.0 * e);
  const double r2 = norm(bracket(h, f) + 2.0 * f);
  const double r3 = norm(bracket(e, f) - h);
  return std::max({r1, r2, r3});
}

bool Sl2Triple::is_strictly_normal(double tol) const {
  const double s = 1.0 + norm(e) + norm(h);
  return norm(e.theta() + f) <= tol * s && norm(h.theta() + h) <= tol * s;
}

Sl2Triple Sl2Triple::rebind(const AlgebraPtr& alg) const {
  return {e.rebind(alg), f.rebind(alg), h.rebind(alg)};
}

// ---------------------------------------------------------------------------
// SlHom

SlHom::SlHom(GVector e, GVector f, GVector h)
    : e_(std::move(e)), f_(std::move(f)), h_(std::move(h)) {
  if (e_.algebra()->id() != f_.algebra()->id() ||
      e_.algebra()->id() != h_.algebra()->id())
    throw AlgebraMismatchError("SlHom values bound to different algebras");
}

SlHom SlHom::zero(const AlgebraPtr& alg) {
  return SlHom(GVector::zero(alg), GVector::zero(alg), GVector::zero(alg));
}

SlHom SlHom::from_triple(const Sl2Triple& t) { return SlHom(t.e, t.f, t.h); }

GVector SlHom::apply(std::complex<double> ce, std::complex<double> cf,
                     std::complex<double> ch) const {
  return ce * e_ + cf * f_ + ch * h_;
}

bool SlHom::is_real(double tol) const {
  return e_.is_real(tol) && f_.is_real(tol) && h_.is_real(tol);
}

bool SlHom::is_theta_compatible(double tol) const {
  const double s = 1.0 + hom_norm(*this);
  return norm(e_.theta() + f_) <= tol * s && norm(h_.theta() + h_) <= tol * s;
}

bool SlHom::is_sigma_compatible(const Eigen::MatrixXd& sigma, double tol) const {
  // sigma_s fixes h and negates e and f.
  const auto& alg = e_.algebra();
  auto apply_sigma = [&](const GVector& v) { return GVector(alg, sigma * v.coeffs()); };
  const double s = 1.0 + hom_norm(*this);
  return norm(apply_sigma(e_) + e_) <= tol * s && norm(apply_sigma(f_) + f_) <= tol * s &&
         norm(apply_sigma(h_) - h_) <= tol * s;
}

double SlHom::morphism_residual() const {
  const double r1 = norm(bracket(h_, e_) - 2.0 * e_);
  const double r2 = norm(bracket(h_, f_) + 2.0 * f_);
  const double r3 = norm(bracket(e_, f_) - h_);
  return std::max({r1, r2, r3});
}

SlHom SlHom::rebind(const AlgebraPtr& alg) const {
  return SlHom(e_.rebind(alg), f_.rebind(alg), h_.rebind(alg));
}

SlHom& SlHom::operator+=(const SlHom& o) {
  e_ += o.e_;
  f_ += o.f_;
  h_ += o.h_;
  return *this;
}

SlHom& SlHom::operator-=(const SlHom& o) {
  e_ -= o.e_;
  f_ -= o.f_;
  h_ -= o.h_;
  return *this;
}

SlHom& SlHom::operator*=(std::complex<double> c) {
  e_ *= c;
  f_ *= c;
  h_ *= c;
  return *this;
}

std::complex<double> hom_inner(const SlHom& a, const SlHom& b) {
  return 0.25 * (inner(a.val_e(), b.val_e()) + inner(a.val_f(), b.val_f()) +
                 inner(a.val_h(), b.val_h()));
}

double hom_norm(const SlHom& a) {
  return std::sqrt(std::max(0.0, hom_inner(a, a).real()));
}

std::vector<SlHom> orthonormalize_homs(const std::vector<SlHom>& homs, double tol) {
  std::vector<SlHom> out;
  for (const auto& cand : homs) {
    SlHom v = cand;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& u : out) v -= hom_inner(u, v) * u;
    const double n = hom_norm(v);
    if (n > tol * (1.0 + hom_norm(cand))) out.push_back((1.0 / n) * v);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Jacobson-Morozov and the strictly normal triple

Sl2Triple jacobson_morozov(const GVector& zeta, double tol) {
  if (zeta.is_zero()) throw ZeroElementError("jacobson_morozov: zeta = 0");
  if (!zeta.is_real(tol)) throw ValidationError("jacobson_morozov: zeta must be real");
  if (!is_ad_nilpotent(zeta, 1e-8))
    throw NotNilpotentError("jacobson_morozov: ad zeta is not nilpotent");

  const auto& alg = zeta.algebra();
  const Eigen::VectorXd z = zeta.re();
  const Eigen::MatrixXd ad_z = alg->ad_real(z);

  // h lies in the image of ad zeta: solve (ad zeta)^2 w = -2 zeta.
  const Eigen::VectorXd w = linalg::min_norm_lsq(ad_z * ad_z, -2.0 * z);
  if ((ad_z * ad_z * w + 2.0 * z).norm() > 1e-7 * z.norm())
    throw NoSolutionError("jacobson_morozov: no h with [h,zeta] = 2 zeta in [zeta,g]");
  const Eigen::VectorXd h = ad_z * w;

  // f from [zeta,f] = h together with [h,f] = -2f.
  const int d = alg->dim();
  Eigen::MatrixXd A(2 * d, d);
  A.topRows(d) = ad_z;
  A.bottomRows(d) = alg->ad_real(h) + 2.0 * Eigen::MatrixXd::Identity(d, d);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(2 * d);
  b.head(d) = h;
  const Eigen::VectorXd f = linalg::min_norm_lsq(A, b);
  if ((A * f - b).norm() > 1e-7 * (1.0 + h.norm()))
    throw NoSolutionError("jacobson_morozov: no completing f");

  Sl2Triple triple{zeta, GVector::from_real(alg, f), GVector::from_real(alg, h)};
  if (triple.relation_residual() > std::max(tol, 1e-7) * (1.0 + norm(zeta)))
    throw NoSolutionError("jacobson_morozov: relations not satisfied");
  return triple;
}

Sl2Triple strictly_normal_from_critical(const GVector& zeta, double tol) {
  if (zeta.is_zero()) throw ZeroElementError("strictly_normal_from_critical: zeta = 0");
  const Criticality crit = is_critical(zeta, tol);
  if (!crit.critical)
    throw NotCriticalError("strictly_normal_from_critical: zeta is not critical");
  const double c = std::sqrt(2.0 / (-crit.a));
  const GVector e = c * zeta;
  const GVector f = -e.theta();
  const GVector h = -bracket(e, e.theta());
  Sl2Triple triple{e, f, h};
  if (triple.relation_residual() > std::max(tol, 1e-7) * (1.0 + norm(e)))
    throw NotCriticalError("strictly_normal_from_critical: triple relations fail");
  return triple;
}

AlgebraPtr normalize_for_orbit(const Sl2Triple& triple) {
  const auto& alg = triple.h.algebra();
  const double raw = killing(triple.h, triple.h).real() / alg->killing_scale();
  if (!(raw > 0.0))
    throw ValidationError("normalize_for_orbit: B(h,h) <= 0, h is not a valid coweight");
  return alg->with_killing_scale(2.0 / raw);
}

AlgebraPtr normalize_for_element_orbit(const GVector& zeta) {
  if (zeta.is_zero()) throw ZeroElementError("normalize_for_element_orbit: zeta = 0");
  if (!is_ad_nilpotent(zeta, 1e-8))
    throw NotNilpotentError("normalize_for_element_orbit: zeta is not nilpotent");
  const auto& alg = zeta.algebra();
  const Eigen::MatrixXcd ad_z = alg->ad_complex(zeta.coeffs());
  const Eigen::VectorXcd w =
      linalg::min_norm_lsq_complex(ad_z * ad_z, (-2.0 * zeta.coeffs()).eval());
  if ((ad_z * ad_z * w + 2.0 * zeta.coeffs()).norm() > 1e-7 * zeta.coeffs().norm())
    throw NoSolutionError("normalize_for_element_orbit: no coweight in [zeta,g]");
  const GVector h(alg, ad_z * w);
  const std::complex<double> raw = killing(h, h) / alg->killing_scale();
  if (!(raw.real() > 0.0) || std::abs(raw.imag()) > 1e-7 * std::abs(raw.real()))
    throw ValidationError("normalize_for_element_orbit: B(h,h) is not positive");
  return alg->with_killing_scale(2.0 / raw.real());
}

// ---------------------------------------------------------------------------
// Isotypic decomposition

std::vector<int> IsotypicDecomposition::occurring_r() const {
  std::vector<int> rs;
  for (const auto& p : pieces_)
    if (std::find(rs.begin(), rs.end(), p.r) == rs.end()) rs.push_back(p.r);
  std::sort(rs.begin(), rs.end());
  return rs;
}

int IsotypicDecomposition::dim_of_r(int r) const {
  int d = 0;
  for (const auto& p : pieces_)
    if (p.r == r) d += static_cast<int>(p.basis.cols());
  return d;
}

const IsotypicDecomposition::Piece* IsotypicDecomposition::piece(int r, int l) const {
  for (const auto& p : pieces_)
    if (p.r == r && p.l == l) return &p;
  return nullptr;
}

Eigen::MatrixXd IsotypicDecomposition::projector_r(int r) const {
  const int d = alg_->dim();
  Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(d, d);
  for (const auto& p : pieces_)
    if (p.r == r) proj += p.basis * p.basis.transpose() * alg_->inner_gram();
  return proj;
}

Eigen::MatrixXd IsotypicDecomposition::projector_rl(int r, int l) const {
  const int d = alg_->dim();
  const Piece* p = piece(r, l);
  if (!p) return Eigen::MatrixXd::Zero(d, d);
  return p->basis * p->basis.transpose() * alg_->inner_gram();
}

GVector IsotypicDecomposition::project_r(const GVector& v, int r) const {
  return GVector(v.algebra(), projector_r(r) * v.coeffs());
}

IsotypicDecomposition isotypic(const SlHom& phi0, double tol) {
  if (phi0.morphism_residual() > tol * (1.0 + hom_norm(phi0)))
    throw ValidationError("isotypic: phi0 is not a morphism");
  if (!phi0.is_theta_compatible(tol) || !phi0.is_real(tol))
    throw ValidationError("isotypic: phi0 must be real and theta-compatible");

  const auto& alg = phi0.algebra();
  const int d = alg->dim();
  const Eigen::MatrixXd ad_e = alg->ad_real(phi0.val_e().re());
  const Eigen::MatrixXd ad_f = alg->ad_real(phi0.val_f().re());
  const Eigen::MatrixXd ad_h = alg->ad_real(phi0.val_h().re());
  const Eigen::MatrixXd omega = 2.0 * (ad_e * ad_f + ad_f * ad_e) + ad_h * ad_h;

  // ad h and the Casimir are self-adjoint for the inner product; work in an
  // inner-orthonormal frame where they become symmetric.
  Eigen::LLT<Eigen::MatrixXd> llt(alg->inner_gram());
  if (llt.info() != Eigen::Success)
    throw InvariantError("isotypic: inner Gram matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();

  const Eigen::MatrixXd sh = linalg::symmetrize_in_frame(L, ad_h);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_h(sh);

  constexpr double cluster_tol = 1e-7;
  std::map<int, std::vector<int>> by_weight;
  for (int i = 0; i < d; ++i) {
    const double l = es_h.eigenvalues()[i];
    const double r = std::round(l);
    if (std::abs(l - r) > cluster_tol * (1.0 + std::abs(l)))
      throw NonIntegerWeightsError("isotypic: ad h has non-integer eigenvalue " +
                                   std::to_string(l));
    by_weight[static_cast<int>(r)].push_back(i);
  }

  const Eigen::MatrixXd somega = linalg::symmetrize_in_frame(L, omega);

  IsotypicDecomposition out;
  out.alg_ = alg;
  for (const auto& [l, idx] : by_weight) {
    Eigen::MatrixXd v(d, idx.size());
    for (size_t c = 0; c < idx.size(); ++c) v.col(static_cast<int>(c)) = es_h.eigenvectors().col(idx[c]);
    // Casimir restricted to the weight space.
    Eigen::MatrixXd m = v.transpose() * somega * v;
    m = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_o(m);
    std::map<int, std::vector<int>> by_r;
    for (int i = 0; i < es_o.eigenvalues().size(); ++i) {
      const double w = es_o.eigenvalues()[i];
      const double rr = -1.0 + std::sqrt(std::max(0.0, 1.0 + w));
      const double rint = std::round(rr);
      if (std::abs(rr - rint) > 1e-6 * (1.0 + std::abs(rr)))
        throw NonIntegerWeightsError("isotypic: Casimir eigenvalue off the integer grid");
      by_r[static_cast<int>(rint)].push_back(i);
    }
    for (const auto& [r, oidx] : by_r) {
      if (r < std::abs(l) || ((r - l) % 2) != 0)
        throw NonIntegerWeightsError("isotypic: weight outside its isotype");
      Eigen::MatrixXd cols(d, oidx.size());
      for (size_t c = 0; c < oidx.size(); ++c) {
        // Back to coefficient coordinates.
        cols.col(static_cast<int>(c)) =
            linalg::from_frame(L, v * es_o.eigenvectors().col(oidx[c]));
      }
      out.pieces_.push_back({r, l, alg->inner_orthonormalize(cols)});
    }
  }

  int total = 0;
  for (const auto& p : out.pieces_) total += static_cast<int>(p.basis.cols());
  if (total != d) throw NumericalError("isotypic: decomposition dimensions do not sum");
  return out;
}

std::string IsotypicDecomposition::to_json_string() const {
  json arr = json::array();
  for (const auto& p : pieces_) {
    json entry;
    entry["r"] = p.r;
    entry["l"] = p.l;
    json basis = json::array();
    for (int c = 0; c < p.basis.cols(); ++c) {
      GVector v = GVector::from_real(alg_, p.basis.col(c));
      basis.push_back(json::parse(element_to_json_string(v)));
    }
    entry["basis"] = basis;
    arr.push_back(entry);
  }
  return arr.dump(2);
}

// ---------------------------------------------------------------------------
// Diagonal action machinery

namespace {

// x.T = ad(Phi0 x) . T - T . ad_s(x) for x in {e,f,h}.
SlHom diag_e(const SlHom& phi0, const SlHom& t) {
  const GVector& ve = phi0.val_e();
  return SlHom(bracket(ve, t.val_e()),
               bracket(ve, t.val_f()) - t.val_h(),
               bracket(ve, t.val_h()) + 2.0 * t.val_e());
}

SlHom diag_f(const SlHom& phi0, const SlHom& t) {
  const GVector& vf = phi0.val_f();
  return SlHom(bracket(vf, t.val_e()) + t.val_h(),
               bracket(vf, t.val_f()),
               bracket(vf, t.val_h()) - 2.0 * t.val_f());
}

SlHom diag_h(const SlHom& phi0, const SlHom& t) {
  const GVector& vh = phi0.val_h();
  return SlHom(bracket(vh, t.val_e()) - 2.0 * t.val_e(),
               bracket(vh, t.val_f()) + 2.0 * t.val_f(),
               bracket(vh, t.val_h()));
}

SlHom project_values_r(const SlHom& phi, const IsotypicDecomposition& iso, int r) {
  const Eigen::MatrixXd proj = iso.projector_r(r);
  const auto& alg = phi.algebra();
  return SlHom(GVector(alg, proj * phi.val_e().coeffs()),
               GVector(alg, proj * phi.val_f().coeffs()),
               GVector(alg, proj * phi.val_h().coeffs()));
}

std::vector<int> diag_types_for(int r) {
  if (r >= 2) return {r - 2, r, r + 2};
  if (r == 1) return {1, 3};
  return {2};
}

} // namespace

SlHom omega_diag(const SlHom& phi0, const SlHom& phi) {
  SlHom ef = diag_e(phi0, diag_f(phi0, phi));
  SlHom fe = diag_f(phi0, diag_e(phi0, phi));
  SlHom hh = diag_h(phi0, diag_h(phi0, phi));
  return 2.0 * ef + 2.0 * fe + hh;
}

SlHom hom_diag_component(const SlHom& phi, const SlHom& phi0,
                         const IsotypicDecomposition& iso, int r, int w) {
  const auto rs = iso.occurring_r();
  if (std::find(rs.begin(), rs.end(), r) == rs.end())
    throw InvalidParameterError("hom_diag_component: isotype r does not occur");
  const std::vector<int> types = diag_types_for(r);
  if (std::find(types.begin(), types.end(), w) == types.end())
    throw InvalidParameterError("hom_diag_component: w must be one of {r-2, r, r+2}");

  SlHom out = project_values_r(phi, iso, r);
  auto casimir_ev = [](int k) { return static_cast<double>(k * k + 2 * k); };
  for (int other : types) {
    if (other == w) continue;
    SlHom num = omega_diag(phi0, out) - casimir_ev(other) * out;
    out = (1.0 / (casimir_ev(w) - casimir_ev(other))) * num;
  }
  return out;
}

double membership_residual(const SlHom& phi, const SlHom& phi0, int r) {
  const GVector& E = phi0.val_e();
  const GVector& F = phi0.val_f();
  const GVector& H = phi0.val_h();
  const GVector rhs_e = -bracket(E, phi.val_h()) + bracket(H, phi.val_e());
  const GVector rhs_f = bracket(F, phi.val_h()) - bracket(H, phi.val_f());
  const GVector rhs_h = 2.0 * bracket(E, phi.val_f()) - 2.0 * bracket(F, phi.val_e());
  const double c = static_cast<double>(r + 2);
  const double res = std::max({norm(c * phi.val_e() - rhs_e), norm(c * phi.val_f() - rhs_f),
                               norm(c * phi.val_h() - rhs_h)});
  return res / (1.0 + hom_norm(phi));
}

std::pair<SlHom, GVector> phi_from_xi(const GVector& xi, const SlHom& phi0,
                                      const IsotypicDecomposition& iso, int r) {
  if (r <= 0) throw InvalidParameterError("phi_from_xi: r must be positive");
  const double tol = 1e-8;
  if (!xi.is_p_valued(tol)) throw ValidationError("phi_from_xi: xi must lie in p");
  const GVector in_r = iso.project_r(xi, r);
  if (norm(xi - in_r) > tol * (1.0 + norm(xi)))
    throw ValidationError("phi_from_xi: xi has components outside g(r)");

  const GVector& E = phi0.val_e();
  const GVector& H = phi0.val_h();
  const GVector eta = (1.0 / r) * bracket(H, xi);
  const double rr = static_cast<double>(r);
  const GVector val_h =
      -rr * xi + (1.0 / (rr + 2.0)) * bracket(H, bracket(H, xi)) +
      (2.0 / (rr + 2.0)) * bracket(H, eta);
  const GVector val_e = bracket(E, xi + eta);
  const GVector val_f = -val_e.theta();
  return {SlHom(val_e, val_f, val_h), eta};
}

std::vector<SlHom> normal_space_basis(const SlHom& phi0,
                                      const IsotypicDecomposition& iso) {
  const auto& alg = phi0.algebra();
  const int d = alg->dim();
  const Eigen::MatrixXd p_proj =
      0.5 * (Eigen::MatrixXd::Identity(d, d) - alg->theta_matrix());

  std::vector<SlHom> raw;
  for (int r : iso.occurring_r()) {
    if (r < 2) continue;
    // Gather a real basis of p cap g(r).
    Eigen::MatrixXd cols(d, iso.dim_of_r(r));
    int at = 0;
    for (const auto& piece : iso.pieces())
      if (piece.r == r) {
        cols.middleCols(at, piece.basis.cols()) = piece.basis;
        at += static_cast<int>(piece.basis.cols());
      }
    const Eigen::MatrixXd pxr = alg->inner_orthonormalize(p_proj * cols, 1e-10);
    for (int c = 0; c < pxr.cols(); ++c) {
      auto [hom, eta] = phi_from_xi(GVector::from_real(alg, pxr.col(c)), phi0, iso, r);
      (void)eta;
      raw.push_back(hom);
    }
  }
  return orthonormalize_homs(raw, 1e-8);
}

// ---------------------------------------------------------------------------
// JSON

std::string hom_to_json_string(const SlHom& h) {
  json j;
  j["e"] = json::parse(element_to_json_string(h.val_e()));
  j["f"] = json::parse(element_to_json_string(h.val_f()));
  j["h"] = json::parse(element_to_json_string(h.val_h()));
  j["flags"] = {{"real", h.is_real()},
                {"theta_compatible", h.is_theta_compatible()},
                {"morphism", h.morphism_residual() <= 1e-9 * (1.0 + hom_norm(h))}};
  return j.dump(2);
}

SlHom hom_from_json_string(const AlgebraPtr& alg, const std::string& text) {
  try {
    json j = json::parse(text);
    auto field = [&](const char* key) {
      return element_from_json_string(alg, j.at(key).dump());
    };
    return SlHom(field("e"), field("f"), field("h"));
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed SlHom JSON: ") + e.what());
  }
}

void save_hom_json(const SlHom& h, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << hom_to_json_string(h) << "\n";
}

SlHom load_hom_json(const AlgebraPtr& alg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return hom_from_json_string(alg, buf.str());
}

} // namespace orbit
