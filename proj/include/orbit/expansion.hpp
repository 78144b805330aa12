#pragma once

#include <map>
#include <vector>

#include "orbit/instanton.hpp"
#include "orbit/sl2.hpp"

namespace orbit {

/// Real coordinates on Hom^{R,theta}(s,g): a map is determined by its value
/// on e (all of g_R) and its value on h (in p_R); the value on f is -theta of
/// the value on e.
class ThetaHomBasis {
public:
  explicit ThetaHomBasis(AlgebraPtr alg);
  int size() const { return static_cast<int>(alg_->dim() + p_cols_); }
  const AlgebraPtr& algebra() const { return alg_; }
  Eigen::VectorXd to_coords(const SlHom& h) const;
  SlHom from_coords(const Eigen::VectorXd& x) const;

private:
  AlgebraPtr alg_;
  Eigen::Index p_cols_;
};

/// Truncated series solution of the instanton flow at t = infinity:
/// Phi(t) = Phi0/t + sum_{k>=2} Phi_k t^{-1-k/2}, with the free data Phi_k^k
/// living in Hom^{R,theta}(s,g(k))(k-2). The skipped k = 1 coefficient is
/// stored as zero.
struct ExpansionSeries {
  SlHom phi0;
  int order = 0;
  std::map<int, SlHom> free;   ///< k -> Phi_k^k
  std::vector<SlHom> coeffs;   ///< index k = 0..order; coeffs[0] = phi0
};

SlHom evaluate_series(const ExpansionSeries& s, double t);
SlHom evaluate_series_derivative(const ExpansionSeries& s, double t);

/// |dPhi_K/dt + Q(Phi_K,Phi_K)| at time t for the truncated series.
double series_ode_residual(const ExpansionSeries& s, double t);

/// The free-data scaling D_a: Phi_k^k -> a^{-k/2} Phi_k^k (a != 0).
std::map<int, SlHom> d_a(const std::map<int, SlHom>& free, double a);

/// Precomputed machinery attached to one strictly normal morphism: the
/// isotypic decomposition, coordinates on Hom^{R,theta}, the matrix of
/// L = Q(Phi0, .), and the normal-space basis grouped by isotype.
class ExpansionWorkspace {
public:
  explicit ExpansionWorkspace(const SlHom& phi0, double tol = 1e-9);

  const SlHom& phi0() const { return phi0_; }
  const IsotypicDecomposition& iso() const { return iso_; }
  const ThetaHomBasis& hom_basis() const { return basis_; }
  const Eigen::MatrixXd& l_matrix() const { return l_; }
  /// Normal-space directions of isotype k (orthonormal in hom_inner).
  const std::map<int, std::vector<SlHom>>& normal_basis_by_k() const {
    return normal_by_k_;
  }
  std::vector<SlHom> normal_basis() const;
  /// Isotypes k >= 2 carrying free data.
  std::vector<int> free_isotypes() const;

  /// Eigenvalues of L (sorted real parts) and their largest distance to the
  /// nearest rational with denominator <= 4; the spectrum is rational.
  struct LSpectrum {
    std::vector<double> eigenvalues;
    double max_rational_distance = 0.0;
  };
  LSpectrum l_spectrum() const;

  /// Solves the coefficient recursion
  /// (2L - (1 + k/2)) Phi_k = -sum_{2<=l<=k-2} Q(Phi_l, Phi_{k-l})
  /// on the orthogonal complement of the kernel and adds the free datum.
  ExpansionSeries build_series(const std::map<int, SlHom>& free, int order) const;

  /// Phi(..;1)(e): the normal-coordinate chart around the core point.
  /// Throws OutOfRadiusError when the series fails the convergence guard at
  /// t = 1.
  GVector f_map(const std::map<int, SlHom>& free, int order = 14) const;

  struct Inversion {
    SlHom phi0;                   ///< possibly rotated morphism
    std::map<int, SlHom> free;    ///< free data over the rotated morphism
    double residual = 0.0;
    int newton_iterations = 0;
  };

  /// Local Newton inversion of f_map, seeded by the core descent and the
  /// normal-space projection of the offset. Far points are handled by
  /// evaluating the series at a larger time and pulling the data back along
  /// the free-data scaling.
  Inversion invert_f(const GVector& point, int order = 14) const;

private:
  GVector f_eval(const std::map<int, SlHom>& free, int order, double t_eval) const;

  SlHom phi0_;
  IsotypicDecomposition iso_;
  ThetaHomBasis basis_;
  Eigen::MatrixXd l_;
  std::map<int, std::vector<SlHom>> normal_by_k_;
  std::map<int, Eigen::MatrixXd> normal_coords_;  // coords of the above
};

/// Matrix of T -> Q(Phi0, T) on Hom^{R,theta}(s,g) in ThetaHomBasis
/// coordinates.
Eigen::MatrixXd l_operator(const SlHom& phi0);

// Series JSON: {"phi0": SlHom, "order": K, "free": [{"k": k, "hom": ...}],
// "coeffs": [...]}
std::string series_to_json_string(const ExpansionSeries& s);

} // namespace orbit
