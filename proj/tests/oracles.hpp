#pragma once

// Test-side oracles, kept independent of the library internals: explicit
// matrix models of sl(n,R), the trace form, and seeded random elements.

#include <Eigen/Dense>
#include <random>
#include <string>

#include "orbit/algebra.hpp"

namespace oracle {

/// Matrix of the named sl(n,R) basis element ("E12", "E10,11", "H3").
inline Eigen::MatrixXd sl_matrix(int n, const std::string& name) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  if (name[0] == 'H') {
    const int k = std::stoi(name.substr(1)) - 1;
    m(k, k) = 1.0;
    m(k + 1, k + 1) = -1.0;
    return m;
  }
  const std::string body = name.substr(1);
  const auto comma = body.find(',');
  int i, j;
  if (comma == std::string::npos) {
    i = body[0] - '0';
    j = body[1] - '0';
  } else {
    i = std::stoi(body.substr(0, comma));
    j = std::stoi(body.substr(comma + 1));
  }
  m(i - 1, j - 1) = 1.0;
  return m;
}

/// Real element of sl(n,R) as a matrix, from its coefficient vector.
inline Eigen::MatrixXd sl_element_matrix(const orbit::AlgebraPtr& alg,
                                         const Eigen::VectorXd& coeffs, int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < alg->dim(); ++i)
    m += coeffs[i] * sl_matrix(n, alg->basis_names()[static_cast<size_t>(i)]);
  return m;
}

/// Coefficients of a matrix in the library's sl(n,R) basis (least squares).
inline Eigen::VectorXd sl_matrix_coeffs(const orbit::AlgebraPtr& alg,
                                        const Eigen::MatrixXd& m, int n) {
  Eigen::MatrixXd span(n * n, alg->dim());
  for (int i = 0; i < alg->dim(); ++i) {
    const Eigen::MatrixXd b = sl_matrix(n, alg->basis_names()[static_cast<size_t>(i)]);
    span.col(i) = Eigen::Map<const Eigen::VectorXd>(b.data(), n * n);
  }
  return span.colPivHouseholderQr().solve(
      Eigen::Map<const Eigen::VectorXd>(m.data(), n * n));
}

inline Eigen::MatrixXd commutator(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return a * b - b * a;
}

/// Random real element with coefficients in [-bound, bound].
inline orbit::GVector random_real(const orbit::AlgebraPtr& alg, std::mt19937_64& rng,
                                  double bound = 1.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Eigen::VectorXd v(alg->dim());
  for (int i = 0; i < alg->dim(); ++i) v[i] = u(rng);
  return orbit::GVector::from_real(alg, v);
}

/// Random element of k_R.
inline orbit::GVector random_k(const orbit::AlgebraPtr& alg, std::mt19937_64& rng,
                               double bound = 1.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Eigen::VectorXd c(alg->k_basis().cols());
  for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
  return orbit::GVector::from_real(alg, alg->k_basis() * c);
}

/// Random element of p_R.
inline orbit::GVector random_p(const orbit::AlgebraPtr& alg, std::mt19937_64& rng,
                               double bound = 1.0) {
  std::uniform_real_distribution<double> u(-bound, bound);
  Eigen::VectorXd c(alg->p_basis().cols());
  for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
  return orbit::GVector::from_real(alg, alg->p_basis() * c);
}

/// Index of a named basis element.
inline int basis_index(const orbit::AlgebraPtr& alg, const std::string& name) {
  for (int i = 0; i < alg->dim(); ++i)
    if (alg->basis_names()[static_cast<size_t>(i)] == name) return i;
  throw std::runtime_error("no basis element named " + name);
}

inline orbit::GVector named(const orbit::AlgebraPtr& alg, const std::string& name) {
  return orbit::GVector::basis(alg, basis_index(alg, name));
}

} // namespace oracle
