#include "orbit/inequality.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "json.hpp"

namespace orbit {

namespace {
const std::complex<double> kI(0.0, 1.0);
}

SpectralData spectral_decompose(const GVector& zeta, double tol) {
  if (zeta.is_zero()) throw ZeroElementError("spectral_decompose: zeta = 0");
  if (!zeta.is_p_valued(tol)) throw NotInPError("spectral_decompose: zeta not in p");
  if (!is_ad_nilpotent(zeta, 1e-7))
    throw NotNilpotentError("spectral_decompose: zeta is not nilpotent");
  const auto& alg = zeta.algebra();
  const int d = alg->dim();

  const GVector xi = zeta.real_part();
  const GVector eta = zeta.imag_part();

  // ad xi is self-adjoint for the inner product; diagonalize it in an
  // inner-orthonormal frame.
  Eigen::LLT<Eigen::MatrixXd> llt(alg->inner_gram());
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd sym = linalg::symmetrize_in_frame(L, alg->ad_real(xi.re()));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);

  // Cluster eigenvalues.
  const double scale = 1.0 + es.eigenvalues().cwiseAbs().maxCoeff();
  std::vector<std::pair<double, std::vector<int>>> clusters;
  for (int i = 0; i < d; ++i) {
    const double l = es.eigenvalues()[i];
    if (!clusters.empty() && std::abs(l - clusters.back().first) < 1e-7 * scale) {
      clusters.back().second.push_back(i);
    } else {
      clusters.push_back({l, {i}});
    }
  }

  SpectralData out{{}, {}, {}, xi, eta};
  const double zeta_n2 = norm_sq(zeta);
  for (auto& [lval, idx] : clusters) {
    // Projector onto the eigenspace in coefficient coordinates.
    Eigen::MatrixXd basis(d, idx.size());
    for (size_t c = 0; c < idx.size(); ++c)
      basis.col(static_cast<long>(c)) =
          linalg::from_frame(L, es.eigenvectors().col(idx[c]));
    const Eigen::MatrixXd proj = basis * basis.transpose() * alg->inner_gram();
    const double lambda = std::abs(lval) < 1e-9 * scale ? 0.0 : lval;
    const GVector eta_l(alg, proj * eta.coeffs());
    GVector zl = kI * eta_l;
    if (lambda == 0.0) zl += xi;
    const double mass = norm_sq(zl);
    if (lambda == 0.0 || mass > 1e-14 * zeta_n2) {
      out.lambda.push_back(lambda);
      out.a.push_back(mass);
      out.zeta_lambda.push_back(zl);
    }
  }

  // Invariants of the decomposition.
  double mass_sum = 0.0;
  for (double m : out.a) mass_sum += m;
  const double nx = norm_sq(xi), ne = norm_sq(eta);
  if (std::abs(mass_sum - zeta_n2) > 1e-8 * zeta_n2 ||
      std::abs(nx - ne) > 1e-8 * zeta_n2 ||
      std::abs(nx - 0.5 * zeta_n2) > 1e-8 * zeta_n2 ||
      std::abs(inner(xi, eta).real()) > 1e-8 * zeta_n2)
    throw NumericalError("spectral_decompose: constraint checks failed");
  for (size_t i = 0; i < out.lambda.size(); ++i) {
    const double l = out.lambda[i];
    const auto match = std::find_if(out.lambda.begin(), out.lambda.end(), [&](double m) {
      return std::abs(m + l) < 1e-7 * scale;
    });
    if (match == out.lambda.end())
      throw NumericalError("spectral_decompose: spectrum is not symmetric");
    const double am = out.a[static_cast<size_t>(match - out.lambda.begin())];
    if (std::abs(am - out.a[i]) > 1e-7 * zeta_n2)
      throw NumericalError("spectral_decompose: masses are not symmetric");
  }
  return out;
}

MComponents m_components_spectral(const SpectralData& data, double t) {
  double mcap = 0.0;
  for (double l : data.lambda) mcap = std::max(mcap, std::abs(l) * std::abs(t));

  double s2 = 0.0;        // sum a e^{2(lt - M)}
  double s2l = 0.0;       // sum lambda a e^{2(lt - M)}
  double s_m3 = 0.0;      // sum lambda^2 (e^{lt-2M} + e^{-lt-2M})^2 a
  double mass = 0.0;
  double sum_l2 = 0.0;
  for (size_t i = 0; i < data.lambda.size(); ++i) {
    const double l = data.lambda[i], a = data.a[i];
    s2 += a * std::exp(2.0 * (l * t - mcap));
    s2l += l * a * std::exp(2.0 * (l * t - mcap));
    const double g = std::exp(l * t - 2.0 * mcap) + std::exp(-l * t - 2.0 * mcap);
    s_m3 += l * l * g * g * a;
    mass += a;
    sum_l2 += l * l * a;
  }
  MComponents out;
  out.m3_sq = s_m3 / (s2 * s2);
  out.m1_sq = 2.0 * s2l * s2l / (mass * s2 * s2);
  out.m0_sq = 4.0 * sum_l2 / (mass * mass);
  return out;
}

IneqCheck lemma85_check(const SpectralData& data, double t) {
  const MComponents mc = m_components_spectral(data, t);
  IneqCheck out;
  out.lhs = mc.m1_sq + mc.m3_sq;
  out.rhs = mc.m0_sq;
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

IneqCheck lemma85_check(const GVector& zeta, double t) {
  return lemma85_check(spectral_decompose(zeta), t);
}

IneqCheck inequality_h_form(const std::map<double, double>& a, double t) {
  double total = 0.0;
  bool has_nonzero = false;
  for (const auto& [l, m] : a) {
    if (!(m > 0.0)) throw ValidationError("inequality_h_form: masses must be positive");
    const auto mirror = a.find(-l);
    if (mirror == a.end() || std::abs(mirror->second - m) > 1e-9 * (1.0 + m))
      throw ValidationError("inequality_h_form: data must satisfy a(l) = a(-l)");
    if (l != 0.0) has_nonzero = true;
    total += m;
  }
  if (!has_nonzero)
    throw ValidationError(
        "inequality_h_form: there must be at least one pair of non-zero indices");
  if (std::abs(total - 2.0) > 1e-9)
    throw ValidationError("inequality_h_form: masses must sum to 2");
  const auto at0 = a.find(0.0);
  if (at0 == a.end() || at0->second < 1.0 - 1e-9)
    throw ValidationError("inequality_h_form: a_0 >= 1 is required");

  double mcap = 0.0;
  for (const auto& [l, m] : a) mcap = std::max(mcap, l * t);
  mcap = std::max(mcap, 0.0);

  double h = 0.0, h1 = 0.0, h2 = 0.0, h2_at_0 = 0.0;
  for (const auto& [l, m] : a) {
    const double w = std::exp(l * t - mcap);
    h += m * w;
    h1 += l * m * w;
    h2 += l * l * m * w;
    h2_at_0 += l * l * m;
  }
  // Sides scaled by e^{-2 mcap}; the scaling is positive so the comparison
  // is unaffected.
  IneqCheck out;
  out.log_scale = 2.0 * mcap;
  out.lhs = h1 * h1 + (2.0 * h2 + 2.0 * h2_at_0 * std::exp(-mcap)) * std::exp(-mcap);
  out.rhs = h2_at_0 * h * h;
  out.holds = out.lhs >= out.rhs - 1e-10;
  return out;
}

double chebyshev_margin(const std::map<double, double>& a_nonzero, int l) {
  if (l < 0) throw InvalidParameterError("chebyshev_margin: l must be >= 0");
  double mass = 0.0;
  for (const auto& [lam, m] : a_nonzero) {
    if (lam == 0.0)
      throw ValidationError("chebyshev_margin: data must omit lambda = 0");
    if (!(m > 0.0)) throw ValidationError("chebyshev_margin: masses must be positive");
    mass += m;
  }
  if (!(mass > 0.0) || mass > 1.0 + 1e-12)
    throw ValidationError("chebyshev_margin: total mass must lie in (0, 1]");
  double p2l2 = 0.0, p2 = 0.0, p2l = 0.0;
  for (const auto& [lam, m] : a_nonzero) {
    p2l2 += std::pow(lam, 2 * l + 2) * m;
    p2 += lam * lam * m;
    p2l += std::pow(lam, 2 * l) * m;
  }
  return p2l2 - p2 * p2l;
}

bool chebyshev_check(const std::map<double, double>& a_nonzero, int l) {
  double scale = 0.0;
  for (const auto& [lam, m] : a_nonzero)
    scale = std::max(scale, std::pow(std::abs(lam), 2 * l + 2) * m);
  return chebyshev_margin(a_nonzero, l) >= -1e-12 * (1.0 + scale);
}

double h_derivative_at_zero(const std::map<double, double>& a, int k) {
  double out = 0.0;
  for (const auto& [lam, m] : a) out += std::pow(lam, k) * m;
  return out;
}

GVector random_p_orbit_point(const SlHom& phi0, std::mt19937_64& rng,
                             double kappa_bound) {
  const auto& alg = phi0.algebra();
  const Eigen::MatrixXd& kb = alg->k_basis();
  std::uniform_real_distribution<double> u(-kappa_bound, kappa_bound);
  auto random_k = [&]() {
    Eigen::VectorXd c(kb.cols());
    for (int i = 0; i < c.size(); ++i) c[i] = u(rng);
    return GVector::from_real(alg, kb * c);
  };
  const GVector seed = phi0.apply(0.5 * kI, 0.5 * kI, 0.5);
  GVector pt = adjoint_exp(kI * random_k(), seed);
  pt = adjoint_exp(random_k(), pt);
  if (!pt.is_p_valued(1e-7))
    throw NumericalError("random_p_orbit_point: point drifted out of p");
  return pt;
}

SweepReport lemma85_sweep(const SlHom& phi0, int samples, double t_max,
                          std::uint64_t seed, int jobs) {
  const auto start = std::chrono::steady_clock::now();
  SweepReport rep;
  rep.samples = samples;
  rep.rng_seed = seed;
  rep.min_margin = std::numeric_limits<double>::infinity();

  jobs = std::max(1, jobs);
  std::vector<SweepReport> partial(static_cast<size_t>(jobs));
  std::vector<std::thread> pool;
  std::atomic<int> failures{0};

  auto worker = [&](int w) {
    SweepReport& loc = partial[static_cast<size_t>(w)];
    loc.min_margin = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(seed + static_cast<std::uint64_t>(w) * 0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> tdist(0.0, t_max);
    for (int i = w; i < samples; i += jobs) {
      try {
        GVector zeta = random_p_orbit_point(phi0, rng);
        zeta = std::sqrt(2.0 / norm_sq(zeta)) * zeta;  // |zeta|^2 = 2
        const SpectralData data = spectral_decompose(zeta);
        const double t = tdist(rng);

        const IneqCheck spectral = lemma85_check(data, t);
        const double margin = spectral.lhs - spectral.rhs;
        if (margin < loc.min_margin) {
          loc.min_margin = margin;
          loc.argmin_sample = i;
        }

        // Same sample in the scalar h-form (masses already sum to 2; the
        // flow time doubles).
        std::map<double, double> masses;
        for (size_t j = 0; j < data.lambda.size(); ++j)
          masses[data.lambda[j]] += data.a[j];
        const IneqCheck hform = inequality_h_form(masses, 2.0 * t);
        if (hform.holds != spectral.holds) loc.disagreements++;
        // The sides agree up to the positive factor (sum a e^{2 lambda t})^2.
        double mcap = 0.0;
        for (double l : data.lambda) mcap = std::max(mcap, std::abs(l) * t);
        double s_scaled = 0.0;
        for (size_t j = 0; j < data.lambda.size(); ++j)
          s_scaled += data.a[j] * std::exp(2.0 * (data.lambda[j] * t - mcap));
        const double hform_margin = (hform.lhs - hform.rhs) / (s_scaled * s_scaled);
        if (std::abs(hform_margin - margin) >
            1e-7 * (1.0 + std::abs(spectral.lhs) + std::abs(spectral.rhs)))
          loc.disagreements++;

        const IneqCheck at0 = lemma85_check(data, 0.0);
        loc.max_equality_gap =
            std::max(loc.max_equality_gap, std::abs(at0.lhs - at0.rhs));
      } catch (const Error&) {
        failures.fetch_add(1);
      }
    }
  };
  for (int w = 0; w < jobs; ++w) pool.emplace_back(worker, w);
  for (auto& th : pool) th.join();

  for (const auto& loc : partial) {
    if (loc.min_margin < rep.min_margin) {
      rep.min_margin = loc.min_margin;
      rep.argmin_sample = loc.argmin_sample;
    }
    rep.max_equality_gap = std::max(rep.max_equality_gap, loc.max_equality_gap);
    rep.disagreements += loc.disagreements;
  }
  if (failures.load() > 0)
    throw NumericalError("lemma85_sweep: sample generation failed " +
                         std::to_string(failures.load()) + " times");
  rep.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

ChebyshevSweepReport chebyshev_sweep(int samples, int l_max, std::uint64_t seed) {
  ChebyshevSweepReport rep;
  rep.samples = samples;
  rep.rng_seed = seed;
  rep.min_margin = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> npairs(1, 4);
  std::uniform_int_distribution<int> lpick(0, l_max);
  std::uniform_real_distribution<double> lam(0.05, 4.0);
  std::uniform_real_distribution<double> mdist(0.01, 1.0);
  for (int i = 0; i < samples; ++i) {
    const int k = npairs(rng);
    std::map<double, double> a;
    std::vector<double> masses(static_cast<size_t>(k));
    double total = 0.0;
    for (auto& m : masses) {
      m = mdist(rng);
      total += m;
    }
    const double budget = mdist(rng);  // total mass in (0,1]
    for (int j = 0; j < k; ++j) {
      double l = lam(rng);
      while (a.count(l)) l = lam(rng);
      a[l] = masses[static_cast<size_t>(j)] / total * budget;
    }
    const int l = lpick(rng);
    const double margin = chebyshev_margin(a, l);
    if (margin < rep.min_margin) {
      rep.min_margin = margin;
      rep.argmin_sample = i;
    }
  }
  // Single pair with unit mass: equality.
  std::map<double, double> single{{1.7, 1.0}};
  rep.equality_single_pair_ok = std::abs(chebyshev_margin(single, 3)) <= 1e-12 *
                                          (1.0 + std::pow(1.7, 8));
  return rep;
}

std::string sweep_report_json(const SweepReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["min_margin"] = r.min_margin;
  j["argmin_sample"] = r.argmin_sample;
  j["max_equality_gap_at_t0"] = r.max_equality_gap;
  j["hform_disagreements"] = r.disagreements;
  j["wall_seconds"] = r.wall_seconds;
  j["rng_seed"] = r.rng_seed;
  return j.dump(2);
}

std::string chebyshev_report_json(const ChebyshevSweepReport& r) {
  nlohmann::json j;
  j["samples"] = r.samples;
  j["min_margin"] = r.min_margin;
  j["argmin_sample"] = r.argmin_sample;
  j["equality_single_pair_ok"] = r.equality_single_pair_ok;
  j["rng_seed"] = r.rng_seed;
  return j.dump(2);
}

} // namespace orbit
