#pragma once

#include <map>
#include <optional>
#include <vector>

#include "orbit/algebra.hpp"

namespace orbit {

/// An sl2-triple (e,f,h) inside g_R: [h,e] = 2e, [h,f] = -2f, [e,f] = h.
struct Sl2Triple {
  GVector e, f, h;

  /// Max norm of the three relation residuals.
  double relation_residual() const;
  /// Strict normality: theta e = -f and theta h = -h.
  bool is_strictly_normal(double tol = 1e-9) const;
  Sl2Triple rebind(const AlgebraPtr& alg) const;
};

/// A C-linear map s -> g stored by its values on the standard basis (e,f,h)
/// of s = sl(2,C).
class SlHom {
public:
  SlHom(GVector e, GVector f, GVector h);
  static SlHom zero(const AlgebraPtr& alg);
  static SlHom from_triple(const Sl2Triple& t);

  const GVector& val_e() const { return e_; }
  const GVector& val_f() const { return f_; }
  const GVector& val_h() const { return h_; }
  const AlgebraPtr& algebra() const { return e_.algebra(); }

  /// Value on ce*e + cf*f + ch*h.
  GVector apply(std::complex<double> ce, std::complex<double> cf,
                std::complex<double> ch) const;

  bool is_real(double tol = 1e-9) const;
  /// theta . Phi = Phi . theta_s, i.e. theta(Phi e) = -Phi f and
  /// theta(Phi h) = -Phi h.
  bool is_theta_compatible(double tol = 1e-9) const;
  /// sigma . Phi = Phi . sigma_s for a commuting involution sigma given by
  /// its matrix on the basis (sigma_s fixes h and negates e, f).
  bool is_sigma_compatible(const Eigen::MatrixXd& sigma, double tol = 1e-9) const;

  /// Residual of the homomorphism property on the three defining brackets.
  double morphism_residual() const;

  SlHom rebind(const AlgebraPtr& alg) const;

  SlHom& operator+=(const SlHom& o);
  SlHom& operator-=(const SlHom& o);
  SlHom& operator*=(std::complex<double> c);
  friend SlHom operator+(SlHom a, const SlHom& b) { return a += b; }
  friend SlHom operator-(SlHom a, const SlHom& b) { return a -= b; }
  friend SlHom operator*(std::complex<double> c, SlHom a) { return a *= c; }
  friend SlHom operator*(SlHom a, std::complex<double> c) { return a *= c; }
  friend SlHom operator-(SlHom a) { return a *= -1.0; }

private:
  GVector e_, f_, h_;
};

/// Inner product on SlHom induced by the inner product on values,
/// <Phi,Psi> = ((Phi e,Psi e) + (Phi f,Psi f) + (Phi h,Psi h)) / 4.
/// Normalized so a strictly normal morphism has unit norm.
std::complex<double> hom_inner(const SlHom& a, const SlHom& b);
double hom_norm(const SlHom& a);

/// Modified Gram-Schmidt over hom_inner; drops directions below tol.
std::vector<SlHom> orthonormalize_homs(const std::vector<SlHom>& homs,
                                       double tol = 1e-10);

/// Embeds a nonzero real ad-nilpotent element as the e-member of an
/// sl2-triple. Solves two chained minimum-norm linear systems, so the result
/// is deterministic.
Sl2Triple jacobson_morozov(const GVector& zeta, double tol = 1e-9);

/// Builds the strictly normal triple over a critical point of |m|^2:
/// rescale zeta so that [[zeta,theta zeta],zeta] = -2 zeta, then take
/// f = -theta e and h = -[e, theta e].
Sl2Triple strictly_normal_from_critical(const GVector& zeta, double tol = 1e-9);

/// Returns a copy of the algebra whose Killing scale makes killing(h,h) = 2.
/// Idempotent; throws ValidationError when B(h,h) <= 0.
AlgebraPtr normalize_for_orbit(const Sl2Triple& triple);

/// Same normalization from a (possibly complex) nilpotent representative:
/// embeds it in a complex sl2-triple internally and rescales by B(h,h).
AlgebraPtr normalize_for_element_orbit(const GVector& zeta);

/// The decomposition g = (+)_{r,l} g(r,l) by sl2 isotype r (Casimir
/// eigenvalue r^2+2r) and ad h weight l, attached to a strictly normal
/// morphism. Bases are real and orthonormal for the inner product.
class IsotypicDecomposition {
public:
  struct Piece {
    int r = 0;
    int l = 0;
    Eigen::MatrixXd basis;  // dim x mult, real columns
  };

  const std::vector<Piece>& pieces() const { return pieces_; }
  const AlgebraPtr& algebra() const { return alg_; }
  std::vector<int> occurring_r() const;
  int dim_of_r(int r) const;
  const Piece* piece(int r, int l) const;

  /// Inner-orthogonal projector onto g(r) (acts on coefficient vectors).
  Eigen::MatrixXd projector_r(int r) const;
  Eigen::MatrixXd projector_rl(int r, int l) const;
  GVector project_r(const GVector& v, int r) const;

  std::string to_json_string() const;

  friend IsotypicDecomposition isotypic(const SlHom& phi0, double tol);

private:
  AlgebraPtr alg_;
  std::vector<Piece> pieces_;
};

/// Simultaneous eigendecomposition of the Casimir 2(ad e ad f + ad f ad e) +
/// (ad h)^2 and of ad h. Throws NonIntegerWeightsError when the ad h spectrum
/// is not integral.
IsotypicDecomposition isotypic(const SlHom& phi0, double tol = 1e-9);

/// Casimir of the diagonal s-action on Hom(s,g), T -> [Phi0 x, T u] - T[x,u].
SlHom omega_diag(const SlHom& phi0, const SlHom& phi);

/// Projection of phi onto Hom(s,g(r))(w), the diagonal-isotype-w part of the
/// maps with values in g(r); w must be one of {r-2, r, r+2} (w >= 0).
SlHom hom_diag_component(const SlHom& phi, const SlHom& phi0,
                         const IsotypicDecomposition& iso, int r, int w);

/// Residual of the diagonal-lowest-type membership identity
/// (r+2) Phi = ad(E) Phi ad(f) + ad(F) Phi ad(e) + 1/2 ad(H) Phi ad(h),
/// relative to 1 + |Phi|. Zero exactly on Hom(s,g(r))(r-2).
double membership_residual(const SlHom& phi, const SlHom& phi0, int r);

/// The map xi in p cap g(r) -> (Phi, eta) with eta = ad(h) xi / r and
/// Phi(e) = [e, xi + eta]; Phi lies in Hom^{R,theta}(s,g(r))(r-2).
std::pair<SlHom, GVector> phi_from_xi(const GVector& xi, const SlHom& phi0,
                                      const IsotypicDecomposition& iso, int r);

/// Orthonormal basis of d_R(Phi0) = (+)_{r>=2} Hom^{R,theta}(s,g(r))(r-2).
/// Evaluation at e on this space is injective and complements [e,k] in [e,g].
std::vector<SlHom> normal_space_basis(const SlHom& phi0,
                                      const IsotypicDecomposition& iso);

// SlHom JSON: {"e": Element, "f": Element, "h": Element, "flags": {...}}
std::string hom_to_json_string(const SlHom& h);
SlHom hom_from_json_string(const AlgebraPtr& alg, const std::string& text);
void save_hom_json(const SlHom& h, const std::string& path);
SlHom load_hom_json(const AlgebraPtr& alg, const std::string& path);

} // namespace orbit
