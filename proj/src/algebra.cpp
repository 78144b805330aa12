#include "orbit/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace orbit {

using json = nlohmann::json;

namespace {

std::atomic<std::uint64_t> g_next_algebra_id{1};

std::string index_name(const std::string& prefix, int i, int j) {
  // One-based indices; comma separator once indices get wide.
  std::ostringstream os;
  if (i + 1 > 9 || j + 1 > 9)
    os << prefix << (i + 1) << "," << (j + 1);
  else
    os << prefix << (i + 1) << (j + 1);
  return os.str();
}

Eigen::VectorXd vectorize(const Eigen::MatrixXcd& m) {
  const auto n = m.size();
  Eigen::VectorXd out(2 * n);
  Eigen::Map<const Eigen::VectorXcd> flat(m.data(), n);
  out.head(n) = flat.real();
  out.tail(n) = flat.imag();
  return out;
}

double snap(double c) {
  const double r = std::round(c);
  return std::abs(c - r) < 1e-9 ? r : c;
}

/// Extracts structure constants and the theta matrix from an explicit matrix
/// realization of the algebra. `theta_of` must act on basis matrices.
struct MatrixRealization {
  std::vector<Eigen::MatrixXcd> basis;
  std::vector<std::string> names;

  template <typename ThetaFn>
  AlgebraPtr build(const std::string& name, ThetaFn theta_of,
                   double killing_scale = 1.0) const {
    const int dim = static_cast<int>(basis.size());
    Eigen::MatrixXd span(2 * basis.front().size(), dim);
    for (int i = 0; i < dim; ++i) span.col(i) = vectorize(basis[static_cast<size_t>(i)]);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(span);
    auto coords = [&](const Eigen::MatrixXcd& m) {
      Eigen::VectorXd c = qr.solve(vectorize(m));
      if ((span * c - vectorize(m)).norm() > 1e-9 * (1.0 + m.norm()))
        throw InvariantError("matrix does not lie in the basis span");
      return c;
    };

    std::vector<BracketEntry> entries;
    for (int i = 0; i < dim; ++i)
      for (int j = i + 1; j < dim; ++j) {
        const Eigen::MatrixXcd comm = basis[static_cast<size_t>(i)] * basis[static_cast<size_t>(j)] -
                                      basis[static_cast<size_t>(j)] * basis[static_cast<size_t>(i)];
        Eigen::VectorXd c = coords(comm);
        for (int k = 0; k < dim; ++k) {
          const double v = snap(c[k]);
          if (v != 0.0) entries.push_back({i, j, k, v});
        }
      }

    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) {
      Eigen::VectorXd c = coords(theta_of(basis[static_cast<size_t>(i)]));
      for (int k = 0; k < dim; ++k) theta(k, i) = snap(c[k]);
    }

    return RealSemisimpleAlgebra::from_structure(name, dim, names, std::move(entries),
                                                 std::move(theta), killing_scale);
  }
};

Eigen::MatrixXcd unit(int n, int i, int j) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

} // namespace

AlgebraPtr RealSemisimpleAlgebra::sl(int n) {
  if (n < 2) throw InvalidParameterError("sl(n,R) requires n >= 2");
  MatrixRealization real;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) {
        real.basis.push_back(unit(n, i, j));
        real.names.push_back(index_name("E", i, j));
      }
  for (int k = 0; k + 1 < n; ++k) {
    real.basis.push_back(unit(n, k, k) - unit(n, k + 1, k + 1));
    real.names.push_back("H" + std::to_string(k + 1));
  }
  std::ostringstream name;
  name << "sl(" << n << ",R)";
  return real.build(name.str(), [](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
    return -m.transpose();
  });
}

AlgebraPtr RealSemisimpleAlgebra::su(int p, int q) {
  const int n = p + q;
  if (p < 0 || q < 0 || n < 2) throw InvalidParameterError("su(p,q) requires p+q >= 2");
  const std::complex<double> I(0.0, 1.0);
  MatrixRealization real;
  auto same_block = [&](int i, int j) { return (i < p) == (j < p); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (same_block(i, j)) {
        real.basis.push_back(unit(n, i, j) - unit(n, j, i));
        real.names.push_back(index_name("A", i, j));
        real.basis.push_back(I * (unit(n, i, j) + unit(n, j, i)));
        real.names.push_back(index_name("S", i, j));
      } else {
        real.basis.push_back(unit(n, i, j) + unit(n, j, i));
        real.names.push_back(index_name("P", i, j));
        real.basis.push_back(I * (unit(n, i, j) - unit(n, j, i)));
        real.names.push_back(index_name("Q", i, j));
      }
    }
  for (int k = 0; k + 1 < n; ++k) {
    real.basis.push_back(I * (unit(n, k, k) - unit(n, k + 1, k + 1)));
    real.names.push_back("D" + std::to_string(k + 1));
  }
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(n, n);
  for (int k = p; k < n; ++k) J(k, k) = -1.0;
  std::ostringstream name;
  name << "su(" << p << "," << q << ")";
  return real.build(name.str(), [J](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
    return J * m * J;
  });
}

AlgebraPtr RealSemisimpleAlgebra::so(int p, int q) {
  const int n = p + q;
  if (p < 0 || q < 0 || n < 3)
    throw InvalidParameterError("so(p,q) requires p+q >= 3 to be semisimple");
  MatrixRealization real;
  auto same_block = [&](int i, int j) { return (i < p) == (j < p); };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (same_block(i, j)) {
        real.basis.push_back(unit(n, i, j) - unit(n, j, i));
        real.names.push_back(index_name("K", i, j));
      } else {
        real.basis.push_back(unit(n, i, j) + unit(n, j, i));
        real.names.push_back(index_name("B", i, j));
      }
    }
  Eigen::MatrixXcd J = Eigen::MatrixXcd::Identity(n, n);
  for (int k = p; k < n; ++k) J(k, k) = -1.0;
  std::ostringstream name;
  name << "so(" << p << "," << q << ")";
  return real.build(name.str(), [J](const Eigen::MatrixXcd& m) -> Eigen::MatrixXcd {
    return J * m * J;
  });
}

AlgebraPtr RealSemisimpleAlgebra::from_structure(std::string name, int dim,
                                                 std::vector<std::string> basis_names,
                                                 std::vector<BracketEntry> brackets,
                                                 Eigen::MatrixXd theta,
                                                 double killing_scale) {
  if (dim <= 0) throw InvalidParameterError("dimension must be positive");
  if (killing_scale <= 0.0) throw InvalidParameterError("killing_scale must be positive");
  if (basis_names.empty()) {
    basis_names.resize(static_cast<size_t>(dim));
    for (int i = 0; i < dim; ++i) basis_names[static_cast<size_t>(i)] = "b" + std::to_string(i);
  }
  if (static_cast<int>(basis_names.size()) != dim)
    throw InvalidParameterError("basis name count does not match dim");
  if (theta.rows() != dim || theta.cols() != dim)
    throw InvalidParameterError("theta must be dim x dim");
  for (const auto& e : brackets) {
    if (e.i < 0 || e.j < 0 || e.k < 0 || e.i >= dim || e.j >= dim || e.k >= dim)
      throw InvalidParameterError("bracket entry index out of range");
    if (e.i >= e.j) throw InvalidParameterError("bracket entries must have i < j");
  }

  auto alg = std::shared_ptr<RealSemisimpleAlgebra>(new RealSemisimpleAlgebra());
  alg->name_ = std::move(name);
  alg->dim_ = dim;
  alg->basis_names_ = std::move(basis_names);
  alg->brackets_ = std::move(brackets);
  alg->theta_ = std::move(theta);
  alg->killing_scale_ = killing_scale;
  alg->id_ = g_next_algebra_id.fetch_add(1);
  alg->finalize();
  return alg;
}

void RealSemisimpleAlgebra::finalize() {
  ad_.assign(static_cast<size_t>(dim_), Eigen::MatrixXd::Zero(dim_, dim_));
  for (const auto& e : brackets_) {
    ad_[static_cast<size_t>(e.i)](e.k, e.j) += e.c;
    ad_[static_cast<size_t>(e.j)](e.k, e.i) -= e.c;
  }
  Eigen::MatrixXd raw(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    for (int j = i; j < dim_; ++j) {
      raw(i, j) = (ad_[static_cast<size_t>(i)] * ad_[static_cast<size_t>(j)]).trace();
      raw(j, i) = raw(i, j);
    }
  killing_gram_ = killing_scale_ * raw;
  Eigen::MatrixXd g = -killing_gram_ * theta_;
  inner_gram_ = 0.5 * (g + g.transpose());

  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(dim_, dim_);
  k_basis_ = linalg::orthonormal_columns(0.5 * (id + theta_), 1e-10);
  p_basis_ = linalg::orthonormal_columns(0.5 * (id - theta_), 1e-10);
}

Eigen::MatrixXd RealSemisimpleAlgebra::ad_real(const Eigen::VectorXd& x) const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    if (x[i] != 0.0) m += x[i] * ad_[static_cast<size_t>(i)];
  return m;
}

Eigen::MatrixXcd RealSemisimpleAlgebra::ad_complex(const Eigen::VectorXcd& x) const {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim_, dim_);
  for (int i = 0; i < dim_; ++i)
    if (x[i] != 0.0) m += x[i] * ad_[static_cast<size_t>(i)];
  return m;
}

Eigen::MatrixXd RealSemisimpleAlgebra::inner_orthonormalize(const Eigen::MatrixXd& cols,
                                                            double tol) const {
  // Modified Gram-Schmidt in the inner-product geometry.
  Eigen::MatrixXd out(dim_, cols.cols());
  int kept = 0;
  const double scale = std::sqrt(inner_gram_.norm());
  for (int c = 0; c < cols.cols(); ++c) {
    Eigen::VectorXd v = cols.col(c);
    for (int pass = 0; pass < 2; ++pass)
      for (int k = 0; k < kept; ++k)
        v -= (out.col(k).dot(inner_gram_ * v)) * out.col(k);
    const double n = std::sqrt(v.dot(inner_gram_ * v));
    if (n > tol * scale * (1.0 + cols.col(c).norm())) out.col(kept++) = v / n;
  }
  return out.leftCols(kept);
}

RealSemisimpleAlgebra::FormSignature RealSemisimpleAlgebra::killing_signature() const {
  FormSignature s;
  auto count = [&](const Eigen::MatrixXd& basis, int& neg, int& pos) {
    if (basis.cols() == 0) return;
    Eigen::MatrixXd restr = basis.transpose() * killing_gram_ * basis;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (restr + restr.transpose()));
    for (int i = 0; i < es.eigenvalues().size(); ++i)
      (es.eigenvalues()[i] < 0 ? neg : pos)++;
  };
  count(k_basis_, s.k_negative, s.k_positive);
  count(p_basis_, s.p_negative, s.p_positive);
  return s;
}

AlgebraPtr RealSemisimpleAlgebra::with_killing_scale(double scale) const {
  return from_structure(name_, dim_, basis_names_, brackets_, theta_, scale);
}

void RealSemisimpleAlgebra::check_invariants(double tol) const {
  const double scale = 1.0 + killing_gram_.cwiseAbs().maxCoeff();

  if ((theta_ * theta_ - Eigen::MatrixXd::Identity(dim_, dim_)).cwiseAbs().maxCoeff() > tol)
    throw InvariantError(name_ + ": theta is not an involution");

  // theta must be a Lie algebra automorphism.
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      Eigen::VectorXd lhs = theta_ * (ad_[static_cast<size_t>(i)] * Eigen::VectorXd::Unit(dim_, j));
      Eigen::VectorXd rhs = ad_real(theta_.col(i)) * theta_.col(j);
      if ((lhs - rhs).cwiseAbs().maxCoeff() > tol)
        throw InvariantError(name_ + ": theta is not bracket-compatible");
    }

  // Jacobi identity on all basis triples.
  double jac = 0.0;
  for (int i = 0; i < dim_; ++i)
    for (int j = i + 1; j < dim_; ++j) {
      const Eigen::VectorXd bij = ad_[static_cast<size_t>(i)] * Eigen::VectorXd::Unit(dim_, j);
      for (int k = j + 1; k < dim_; ++k) {
        Eigen::VectorXd r = ad_real(bij) * Eigen::VectorXd::Unit(dim_, k);
        r += ad_real(ad_[static_cast<size_t>(j)] * Eigen::VectorXd::Unit(dim_, k)) *
             Eigen::VectorXd::Unit(dim_, i);
        r += ad_real(ad_[static_cast<size_t>(k)] * Eigen::VectorXd::Unit(dim_, i)) *
             Eigen::VectorXd::Unit(dim_, j);
        jac = std::max(jac, r.cwiseAbs().maxCoeff());
      }
    }
  if (jac > tol) throw InvariantError(name_ + ": Jacobi identity fails");

  if ((inner_gram_ - inner_gram_.transpose()).cwiseAbs().maxCoeff() > tol * scale)
    throw InvariantError(name_ + ": inner form is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(inner_gram_);
  if (es.eigenvalues().minCoeff() <= tol * scale)
    throw InvariantError(name_ + ": inner form is not positive definite");

  const FormSignature sig = killing_signature();
  if (sig.k_positive != 0 || sig.k_negative != k_basis_.cols())
    throw InvariantError(name_ + ": Killing form is not negative definite on k");
  if (sig.p_negative != 0 || sig.p_positive != p_basis_.cols())
    throw InvariantError(name_ + ": Killing form is not positive definite on p");
}

// ---------------------------------------------------------------------------
// GVector

GVector::GVector(AlgebraPtr alg, Eigen::VectorXcd coeffs)
    : alg_(std::move(alg)), v_(std::move(coeffs)) {
  if (!alg_) throw InvalidParameterError("GVector requires an algebra");
  if (v_.size() != alg_->dim())
    throw DimensionMismatchError("coefficient vector has wrong length");
}

GVector GVector::zero(const AlgebraPtr& alg) {
  return GVector(alg, Eigen::VectorXcd::Zero(alg->dim()));
}

GVector GVector::basis(const AlgebraPtr& alg, int i) {
  if (i < 0 || i >= alg->dim()) throw InvalidParameterError("basis index out of range");
  return GVector(alg, Eigen::VectorXcd::Unit(alg->dim(), i));
}

GVector GVector::from_real(const AlgebraPtr& alg, const Eigen::VectorXd& re) {
  return GVector(alg, re.cast<std::complex<double>>());
}

GVector GVector::conj() const { return GVector(alg_, v_.conjugate()); }

GVector GVector::theta() const { return GVector(alg_, alg_->theta_matrix() * v_); }

GVector GVector::tau() const { return GVector(alg_, alg_->theta_matrix() * v_.conjugate()); }

GVector GVector::real_part() const {
  return GVector(alg_, v_.real().cast<std::complex<double>>());
}

GVector GVector::imag_part() const {
  return GVector(alg_, v_.imag().cast<std::complex<double>>());
}

bool GVector::is_zero(double tol) const { return v_.norm() <= tol; }

bool GVector::is_real(double tol) const {
  return v_.imag().cwiseAbs().maxCoeff() <= tol * (1.0 + v_.norm());
}

bool GVector::is_p_valued(double tol) const {
  return (alg_->theta_matrix() * v_ + v_).norm() <= tol * (1.0 + v_.norm());
}

bool GVector::is_k_valued(double tol) const {
  return (alg_->theta_matrix() * v_ - v_).norm() <= tol * (1.0 + v_.norm());
}

GVector GVector::rebind(const AlgebraPtr& alg) const {
  if (alg->dim() != alg_->dim() || alg->brackets().size() != alg_->brackets().size())
    throw AlgebraMismatchError("rebind target has different structure");
  return GVector(alg, v_);
}

namespace {
void require_same(const GVector& a, const GVector& b) {
  if (a.algebra()->id() != b.algebra()->id())
    throw AlgebraMismatchError("elements belong to different algebra instances");
}
} // namespace

GVector& GVector::operator+=(const GVector& o) {
  require_same(*this, o);
  v_ += o.v_;
  return *this;
}

GVector& GVector::operator-=(const GVector& o) {
  require_same(*this, o);
  v_ -= o.v_;
  return *this;
}

GVector& GVector::operator*=(std::complex<double> c) {
  v_ *= c;
  return *this;
}

GVector bracket(const GVector& x, const GVector& y) {
  require_same(x, y);
  return GVector(x.algebra(), x.algebra()->ad_complex(x.coeffs()) * y.coeffs());
}

std::complex<double> killing(const GVector& x, const GVector& y) {
  require_same(x, y);
  return x.coeffs().transpose() * x.algebra()->killing_gram() * y.coeffs();
}

std::complex<double> inner(const GVector& x, const GVector& y) {
  require_same(x, y);
  const Eigen::VectorXcd ty = x.algebra()->theta_matrix() * y.coeffs().conjugate();
  const std::complex<double> b = x.coeffs().transpose() * x.algebra()->killing_gram() * ty;
  return -b;
}

double norm_sq(const GVector& x) { return inner(x, x).real(); }

double norm(const GVector& x) { return std::sqrt(std::max(0.0, norm_sq(x))); }

std::pair<GVector, GVector> cartan_split(const GVector& x) {
  const GVector tx = x.theta();
  return {0.5 * (x + tx), 0.5 * (x - tx)};
}

double nilpotency_residual(const GVector& x) {
  Eigen::MatrixXcd a = x.algebra()->ad_complex(x.coeffs());
  const double n = a.norm();
  if (n == 0.0) return 0.0;
  a /= n;
  Eigen::MatrixXcd p = a;
  for (int k = 1; k < x.algebra()->dim(); ++k) p = p * a;
  return p.norm();
}

bool is_ad_nilpotent(const GVector& x, double tol) { return nilpotency_residual(x) <= tol; }

GVector adjoint_exp(const GVector& a, const GVector& x) {
  require_same(a, x);
  if (is_ad_nilpotent(a, 1e-10)) {
    // Terminating series.
    Eigen::MatrixXcd ad = a.algebra()->ad_complex(a.coeffs());
    Eigen::VectorXcd acc = x.coeffs();
    Eigen::VectorXcd term = x.coeffs();
    for (int k = 1; k <= a.algebra()->dim() + 1; ++k) {
      term = (ad * term) / static_cast<double>(k);
      acc += term;
    }
    return GVector(a.algebra(), acc);
  }
  if (a.is_real(1e-13)) {
    Eigen::MatrixXd m = linalg::expm(a.algebra()->ad_real(a.re()));
    return GVector(a.algebra(), m * x.coeffs());
  }
  Eigen::MatrixXcd m = linalg::expm(a.algebra()->ad_complex(a.coeffs()));
  return GVector(a.algebra(), m * x.coeffs());
}

// ---------------------------------------------------------------------------
// JSON

std::string RealSemisimpleAlgebra::to_json_string() const {
  json j;
  j["name"] = name_;
  j["dim"] = dim_;
  j["basis"] = basis_names_;
  json br = json::array();
  for (const auto& e : brackets_) br.push_back({e.i, e.j, e.k, e.c});
  j["brackets"] = br;
  json th = json::array();
  for (int r = 0; r < dim_; ++r) {
    json row = json::array();
    for (int c = 0; c < dim_; ++c) row.push_back(theta_(r, c));
    th.push_back(row);
  }
  j["theta"] = th;
  j["killing_scale"] = killing_scale_;
  return j.dump(2);
}

AlgebraPtr RealSemisimpleAlgebra::from_json_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed algebra JSON: ") + e.what());
  }
  try {
    const int dim = j.at("dim").get<int>();
    std::vector<std::string> names = j.value("basis", std::vector<std::string>{});
    std::vector<BracketEntry> entries;
    for (const auto& row : j.at("brackets")) {
      if (!row.is_array() || row.size() != 4)
        throw IoError("bracket entries must be [i,j,k,c]");
      entries.push_back({row[0].get<int>(), row[1].get<int>(), row[2].get<int>(),
                         row[3].get<double>()});
    }
    Eigen::MatrixXd theta(dim, dim);
    const auto& th = j.at("theta");
    if (static_cast<int>(th.size()) != dim) throw IoError("theta has wrong shape");
    for (int r = 0; r < dim; ++r)
      for (int c = 0; c < dim; ++c) theta(r, c) = th[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>();
    auto alg = from_structure(j.value("name", std::string("custom")), dim, std::move(names),
                              std::move(entries), std::move(theta),
                              j.value("killing_scale", 1.0));
    alg->check_invariants();
    return alg;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed algebra JSON: ") + e.what());
  }
}

AlgebraPtr RealSemisimpleAlgebra::load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_string(buf.str());
}

void RealSemisimpleAlgebra::save_json(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << to_json_string() << "\n";
}

std::string element_to_json_string(const GVector& v) {
  const Eigen::VectorXd re = v.re();
  const Eigen::VectorXd im = v.im();
  json j;
  j["re"] = std::vector<double>(re.data(), re.data() + re.size());
  j["im"] = std::vector<double>(im.data(), im.data() + im.size());
  return j.dump();
}

GVector element_from_json_string(const AlgebraPtr& alg, const std::string& text) {
  try {
    json j = json::parse(text);
    auto re = j.at("re").get<std::vector<double>>();
    auto im = j.value("im", std::vector<double>(re.size(), 0.0));
    if (static_cast<int>(re.size()) != alg->dim() || im.size() != re.size())
      throw IoError("element length does not match algebra dimension");
    Eigen::VectorXcd v(alg->dim());
    for (int i = 0; i < alg->dim(); ++i)
      v[i] = {re[static_cast<size_t>(i)], im[static_cast<size_t>(i)]};
    return GVector(alg, v);
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed element JSON: ") + e.what());
  }
}

void save_element_json(const GVector& v, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << element_to_json_string(v) << "\n";
}

GVector load_element_json(const AlgebraPtr& alg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return element_from_json_string(alg, buf.str());
}

// ---------------------------------------------------------------------------
// linalg helpers

namespace linalg {

Eigen::VectorXd min_norm_lsq(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                             double rank_tol) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(A);
  cod.setThreshold(rank_tol);
  return cod.solve(b);
}

Eigen::VectorXcd min_norm_lsq_complex(const Eigen::MatrixXcd& A, const Eigen::VectorXcd& b,
                                      double rank_tol) {
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXcd> cod(A);
  cod.setThreshold(rank_tol);
  return cod.solve(b);
}

Eigen::MatrixXd orthonormal_columns(const Eigen::MatrixXd& cols, double tol) {
  if (cols.cols() == 0) return cols;
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(cols);
  qr.setThreshold(tol);
  const auto rank = qr.rank();
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(cols.rows(), rank);
  return q;
}

Eigen::MatrixXd nullspace(const Eigen::MatrixXd& A, double tol) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? sv[0] * tol : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;
  return svd.matrixV().rightCols(A.cols() - rank);
}

double smallest_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.cols() == 0 || v.cols() == 0) return M_PI / 2;
  Eigen::MatrixXd qu = orthonormal_columns(u, 1e-12);
  Eigen::MatrixXd qv = orthonormal_columns(v, 1e-12);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qu.transpose() * qv);
  const double c = std::min(1.0, svd.singularValues().maxCoeff());
  return std::acos(c);
}

double largest_principal_angle(const Eigen::MatrixXd& u, const Eigen::MatrixXd& v) {
  if (u.cols() == 0 && v.cols() == 0) return 0.0;
  if (u.cols() == 0 || v.cols() == 0) return M_PI / 2;
  Eigen::MatrixXd qu = orthonormal_columns(u, 1e-12);
  Eigen::MatrixXd qv = orthonormal_columns(v, 1e-12);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(qu.transpose() * qv);
  const double c = std::max(-1.0, std::min(1.0, svd.singularValues().minCoeff()));
  return std::acos(c);
}

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) { return a.exp(); }

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) { return a.exp(); }

Eigen::MatrixXd symmetrize_in_frame(const Eigen::MatrixXd& chol_l,
                                    const Eigen::MatrixXd& a) {
  // L^T A L^{-T} = L^T (L^{-1} A^T)^T
  const Eigen::MatrixXd y = chol_l.triangularView<Eigen::Lower>().solve(a.transpose());
  Eigen::MatrixXd out = chol_l.transpose() * y.transpose();
  return 0.5 * (out + out.transpose());
}

Eigen::VectorXd from_frame(const Eigen::MatrixXd& chol_l, const Eigen::VectorXd& x) {
  return chol_l.transpose().triangularView<Eigen::Upper>().solve(x);
}

} // namespace linalg

} // namespace orbit
