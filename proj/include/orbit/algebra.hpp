#pragma once

#include <Eigen/Dense>
#include <complex>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "orbit/errors.hpp"

namespace orbit {

class RealSemisimpleAlgebra;
using AlgebraPtr = std::shared_ptr<const RealSemisimpleAlgebra>;

/// One nonzero structure constant: [b_i, b_j] has coefficient c on b_k.
/// Only entries with i < j are stored; the i > j half follows by antisymmetry.
struct BracketEntry {
  int i = 0;
  int j = 0;
  int k = 0;
  double c = 0.0;
};

/// A real semisimple Lie algebra given by structure constants over a fixed
/// basis, together with a Cartan involution and a rescalable Killing form.
///
/// Instances are immutable after construction and safe to share across
/// threads. Each instance carries a unique identity token; elements bound to
/// different instances (e.g. before and after an orbit normalization) do not
/// mix. The Killing form is B(x,y) = killing_scale * trace(ad x . ad y).
class RealSemisimpleAlgebra {
public:
  /// sl(n,R), n >= 2, with the Cartan involution X -> -X^t.
  /// Basis order: E_ij for i != j in row-major order, then the diagonal
  /// differences H_k = E_kk - E_{k+1,k+1}.
  static AlgebraPtr sl(int n);

  /// su(p,q) as a real Lie algebra, theta = conjugation by diag(I_p, -I_q).
  static AlgebraPtr su(int p, int q);

  /// so(p,q), p + q >= 3, theta = conjugation by diag(I_p, -I_q).
  static AlgebraPtr so(int p, int q);

  /// Builds from explicit data and validates all structural invariants.
  static AlgebraPtr from_structure(std::string name, int dim,
                                   std::vector<std::string> basis_names,
                                   std::vector<BracketEntry> brackets,
                                   Eigen::MatrixXd theta,
                                   double killing_scale = 1.0);

  static AlgebraPtr load_json(const std::string& path);
  void save_json(const std::string& path) const;
  std::string to_json_string() const;
  static AlgebraPtr from_json_string(const std::string& text);

  /// Copy with a different Killing rescaling factor (fresh identity token).
  AlgebraPtr with_killing_scale(double scale) const;

  int dim() const { return dim_; }
  const std::string& name() const { return name_; }
  const std::vector<std::string>& basis_names() const { return basis_names_; }
  const std::vector<BracketEntry>& brackets() const { return brackets_; }
  double killing_scale() const { return killing_scale_; }
  std::uint64_t id() const { return id_; }

  const Eigen::MatrixXd& theta_matrix() const { return theta_; }
  /// Gram matrix of the (rescaled) Killing form on the basis.
  const Eigen::MatrixXd& killing_gram() const { return killing_gram_; }
  /// Gram matrix of the inner product (x,y) = -B(x, theta y); positive definite.
  const Eigen::MatrixXd& inner_gram() const { return inner_gram_; }
  /// ad of the i-th basis element, acting on coefficient vectors.
  const Eigen::MatrixXd& ad_basis(int i) const { return ad_[static_cast<size_t>(i)]; }

  Eigen::MatrixXd ad_real(const Eigen::VectorXd& x) const;
  Eigen::MatrixXcd ad_complex(const Eigen::VectorXcd& x) const;

  /// Euclidean-orthonormal column bases of the +1 / -1 eigenspaces of theta.
  const Eigen::MatrixXd& k_basis() const { return k_basis_; }
  const Eigen::MatrixXd& p_basis() const { return p_basis_; }

  /// Gram-Schmidt with respect to the inner product; drops rank-deficient
  /// directions below tol.
  Eigen::MatrixXd inner_orthonormalize(const Eigen::MatrixXd& cols,
                                       double tol = 1e-12) const;

  /// Signature of the Killing form restricted to k and to p, for diagnostics.
  struct FormSignature {
    int k_negative = 0, k_positive = 0;
    int p_negative = 0, p_positive = 0;
  };
  FormSignature killing_signature() const;

  /// Throws InvariantError when antisymmetry, Jacobi, the involution
  /// properties, or definiteness of the forms fail beyond tol.
  void check_invariants(double tol = 1e-9) const;

private:
  RealSemisimpleAlgebra() = default;
  void finalize();  // precomputes ad tables, Gram matrices, k/p bases

  std::string name_;
  int dim_ = 0;
  std::vector<std::string> basis_names_;
  std::vector<BracketEntry> brackets_;
  Eigen::MatrixXd theta_;
  double killing_scale_ = 1.0;
  std::uint64_t id_ = 0;

  std::vector<Eigen::MatrixXd> ad_;
  Eigen::MatrixXd killing_gram_;
  Eigen::MatrixXd inner_gram_;
  Eigen::MatrixXd k_basis_, p_basis_;
};

/// An element of g = C (x) g_R as a complex coefficient vector over the
/// algebra's fixed real basis.
class GVector {
public:
  GVector(AlgebraPtr alg, Eigen::VectorXcd coeffs);

  static GVector zero(const AlgebraPtr& alg);
  static GVector basis(const AlgebraPtr& alg, int i);
  static GVector from_real(const AlgebraPtr& alg, const Eigen::VectorXd& re);

  const AlgebraPtr& algebra() const { return alg_; }
  const Eigen::VectorXcd& coeffs() const { return v_; }
  Eigen::VectorXd re() const { return v_.real(); }
  Eigen::VectorXd im() const { return v_.imag(); }

  GVector conj() const;        ///< conjugation with respect to g_R
  GVector theta() const;       ///< Cartan involution, extended C-linearly
  GVector tau() const;         ///< theta . conj (conjugation w.r.t. u_R)
  GVector real_part() const;   ///< (z + conj z)/2
  GVector imag_part() const;   ///< (z - conj z)/(2i), a real vector

  bool is_zero(double tol = 1e-12) const;
  bool is_real(double tol = 1e-9) const;
  bool is_p_valued(double tol = 1e-9) const;  ///< theta v = -v
  bool is_k_valued(double tol = 1e-9) const;  ///< theta v = +v

  /// Rebinds to another algebra instance with identical structure (used after
  /// an orbit normalization changes the Killing scale).
  GVector rebind(const AlgebraPtr& alg) const;

  GVector& operator+=(const GVector& o);
  GVector& operator-=(const GVector& o);
  GVector& operator*=(std::complex<double> c);

  friend GVector operator+(GVector a, const GVector& b) { return a += b; }
  friend GVector operator-(GVector a, const GVector& b) { return a -= b; }
  friend GVector operator*(std::complex<double> c, GVector a) { return a *= c; }
  friend GVector operator*(GVector a, std::complex<double> c) { return a *= c; }
  friend GVector operator-(GVector a) { return a *= -1.0; }

private:
  AlgebraPtr alg_;
  Eigen::VectorXcd v_;
};

/// C-bilinear extension of the Lie bracket.
GVector bracket(const GVector& x, const GVector& y);

/// Rescaled Killing form, C-bilinear.
std::complex<double> killing(const GVector& x, const GVector& y);

/// Hermitian inner product (x, y) = -B(x, theta conj(y)); reduces to
/// -B(x, theta y) on real vectors. Conjugate-linear in the second slot.
std::complex<double> inner(const GVector& x, const GVector& y);

double norm_sq(const GVector& x);
double norm(const GVector& x);

/// Splits x = k_part + p_part along the Cartan decomposition.
std::pair<GVector, GVector> cartan_split(const GVector& x);

/// Relative norm of (ad x)^dim; approximately zero iff x is ad-nilpotent.
double nilpotency_residual(const GVector& x);
bool is_ad_nilpotent(const GVector& x, double tol = 1e-8);

/// Ad(exp(ad a)) x. Uses the terminating series when a is nilpotent.
GVector adjoint_exp(const GVector& a, const GVector& x);

// Element JSON: {"re": [...], "im": [...]}
std::string element_to_json_string(const GVector& v);
GVector element_from_json_string(const AlgebraPtr& alg, const std::string& text);
void save_element_json(const GVector& v, const std::string& path);
GVector load_element_json(const AlgebraPtr& alg, const std::string& path);

namespace linalg {

/// Minimum-norm least-squares solution with a relative rank threshold.
Eigen::VectorXd min_norm_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double rank_tol = 1e-10);
Eigen::VectorXcd min_norm_lsq_complex(const Eigen::MatrixXcd& A,
                                      const Eigen::VectorXcd& b,
                                      double rank_tol = 1e-10);

/// Euclidean-orthonormal basis of the column span (rank-revealing).
Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& cols, double tol = 1e-10);

/// Orthonormal basis of the (right) null space of A.
Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double tol = 1e-10);

/// Smallest principal angle between two column spans (radians).
double smallest_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Largest principal angle between two column spans (radians); zero iff the
/// spans coincide.
double largest_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v);

/// Matrix exponential (scaling-and-squaring with Pade kernel).
Eigen::MatrixXd expm(const Eigen::MatrixXd& a);
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

/// For G = L L^T positive definite and A self-adjoint with respect to G
/// (A^T G = G A), returns the symmetric matrix L^T A L^{-T} representing A in
/// a G-orthonormal frame. Frame vectors map back via L^{-T}.
Eigen::MatrixXd symmetrize_in_frame(const Eigen::MatrixXd& chol_l,
                                    const Eigen::MatrixXd& a);

/// Back-substitution L^{-T} x for the frame above.
Eigen::VectorXd from_frame(const Eigen::MatrixXd& chol_l, const Eigen::VectorXd& x);

} // namespace linalg

} // namespace orbit
