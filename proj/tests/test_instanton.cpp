#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "orbit/instanton.hpp"
#include "orbit/moment.hpp"

using namespace orbit;
using oracle::named;

namespace {

const std::complex<double> kI(0.0, 1.0);

AlgebraPtr normalized_sl2() {
  auto alg = RealSemisimpleAlgebra::sl(2);
  Sl2Triple t{named(alg, "E12"), named(alg, "E21"), named(alg, "H1")};
  return normalize_for_orbit(t);
}

SlHom identity_embedding(const AlgebraPtr& sl2) {
  return SlHom(named(sl2, "E12"), named(sl2, "E21"), named(sl2, "H1"));
}

SlHom core_solution(const SlHom& phi0, double t) { return (1.0 / (1.0 + t)) * phi0; }

/// A mildly perturbed bounded initial condition: the core solution shifted
/// in time, a Phi0 / (t + a), solves the flow and stays bounded.
SlHom shifted_core(const SlHom& phi0, double shift) {
  return (1.0 / shift) * phi0;
}

} // namespace

TEST_CASE("Q-pairing fixed points and symmetry") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  CHECK(hom_norm(q_pairing(phi0, phi0) - phi0) < 1e-12);

  std::mt19937_64 rng(61);
  const SlHom t1(oracle::random_real(alg, rng), oracle::random_real(alg, rng),
                 oracle::random_real(alg, rng));
  const SlHom t2(oracle::random_real(alg, rng), oracle::random_real(alg, rng),
                 oracle::random_real(alg, rng));
  CHECK(hom_norm(q_pairing(t1, t2) - q_pairing(t2, t1)) < 1e-12);

  SUBCASE("bilinearity") {
    const SlHom lhs = q_pairing(t1 + 2.0 * t2, t1);
    const SlHom rhs = q_pairing(t1, t1) + 2.0 * q_pairing(t2, t1);
    CHECK(hom_norm(lhs - rhs) < 1e-12);
  }
  SUBCASE("Q preserves reality and theta-compatibility") {
    const SlHom a = phi0;
    std::mt19937_64 r2(67);
    GVector ve = oracle::random_real(alg, r2);
    const SlHom b(ve, -ve.theta(), oracle::random_p(alg, r2));
    const SlHom q = q_pairing(a, b);
    CHECK(q.is_real(1e-10));
    CHECK(q.is_theta_compatible(1e-10));
  }
}

TEST_CASE("is_morphism") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  CHECK(is_morphism(phi0));
  CHECK_FALSE(is_morphism((1.0 / 1.5) * phi0));  // scaled morphisms fail
  CHECK_FALSE(is_morphism(SlHom::zero(alg)));    // zero map excluded
}

TEST_CASE("flow right-hand side") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  CHECK(hom_norm(ode_rhs(phi0) + phi0) < 1e-12);
  CHECK(hom_norm(ode_rhs(SlHom::zero(alg))) == 0.0);
  const double t = 0.7;
  const SlHom scaled = core_solution(phi0, t);
  // d/dt [phi0/(1+t)] = -phi0/(1+t)^2
  CHECK(hom_norm(ode_rhs(scaled) + (1.0 / ((1.0 + t) * (1.0 + t))) * phi0) < 1e-12);
}

TEST_CASE("integration reproduces the core solution") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const Trajectory traj = integrate(phi0, 0.0, 10.0);
  double worst = 0.0;
  for (size_t i = 0; i < traj.t.size(); ++i)
    worst = std::max(worst, hom_norm(traj.phi[i] - core_solution(phi0, traj.t[i])));
  CHECK(worst < 1e-8);

  SUBCASE("zero initial condition stays zero") {
    const Trajectory z = integrate(SlHom::zero(alg), 0.0, 5.0);
    CHECK(hom_norm(z.back()) == 0.0);
  }
  SUBCASE("an unbounded initial condition blows up") {
    // -phi0/(1-t) solves the flow and explodes at t = 1.
    CHECK_THROWS_AS((void)integrate(-1.0 * phi0, 0.0, 2.0), BlowUpError);
  }
}

TEST_CASE("curve reparametrization c_a") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const Trajectory traj = integrate(shifted_core(phi0, 1.3), 0.0, 6.0);

  SUBCASE("a < 1 is rejected and a = 1 is the identity") {
    CHECK_THROWS_AS((void)c_a(traj, 0.5), InvalidParameterError);
    const Trajectory id = c_a(traj, 1.0);
    CHECK(id.t == traj.t);
    CHECK(hom_norm(id.back() - traj.back()) == 0.0);
  }
  SUBCASE("the core solution is fixed") {
    const Trajectory core = integrate(phi0, 0.0, 6.0);
    const Trajectory moved = c_a(core, 2.5);
    for (size_t i = 0; i < moved.t.size(); ++i)
      CHECK(hom_norm(moved.phi[i] - core_solution(phi0, moved.t[i])) < 1e-8);
  }
  SUBCASE("semigroup law c_2 . c_3 = c_6, checked by resampling") {
    const Trajectory lhs = c_a(c_a(traj, 3.0), 2.0);
    const Trajectory rhs = c_a(traj, 6.0);
    REQUIRE(lhs.t.size() == rhs.t.size());
    for (size_t i = 0; i < lhs.t.size(); ++i) {
      CHECK(lhs.t[i] == doctest::Approx(rhs.t[i]).epsilon(1e-14));
      CHECK(hom_norm(lhs.phi[i] - rhs.at(lhs.t[i])) < 1e-9);
    }
  }
  SUBCASE("c_a_point agrees with the curve definition") {
    const double a = 2.0;
    const SlHom start = shifted_core(phi0, 1.3);
    const SlHom moved = c_a_point(start, a);
    // a Psi(a-1) for Psi = phi0/(t + 1.3).
    CHECK(hom_norm(moved - (a / (a - 1.0 + 1.3)) * phi0) < 1e-9);
  }
}

TEST_CASE("scaling flow") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const Trajectory core = integrate(phi0, 0.0, 6.0);
  SUBCASE("a = 1 is the identity; a <= 0 rejected") {
    CHECK_THROWS_AS((void)scale_flow(core, 0.0), InvalidParameterError);
    const Trajectory id = scale_flow(core, 1.0);
    CHECK(id.t == core.t);
  }
  SUBCASE("core solution maps to a phi0 / (1 + a t)") {
    const double a = 2.0;
    const Trajectory moved = scale_flow(core, a);
    for (size_t i = 0; i < moved.t.size(); ++i)
      CHECK(hom_norm(moved.phi[i] - (a / (1.0 + a * moved.t[i])) * phi0) < 1e-8);
  }
  SUBCASE("composition law") {
    const Trajectory lhs = scale_flow(scale_flow(core, 2.0), 3.0);
    const Trajectory rhs = scale_flow(core, 6.0);
    for (size_t i = 0; i < lhs.t.size(); ++i) {
      CHECK(lhs.t[i] == doctest::Approx(rhs.t[i]).epsilon(1e-14));
      CHECK(hom_norm(lhs.phi[i] - rhs.phi[i]) < 1e-12);
    }
  }
}

TEST_CASE("quadratic scaling of solutions") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> cd(0.5, 2.0);
  const SlHom start = shifted_core(phi0, 1.4);
  for (int rep = 0; rep < 3; ++rep) {
    const double c = cd(rng);
    const double t = 1.1;
    const Trajectory scaled = integrate(c * start, 0.0, t);
    const Trajectory base = integrate(start, 0.0, c * t);
    CHECK(hom_norm(scaled.back() - c * base.at(c * t)) < 1e-8);
  }
}

TEST_CASE("limit extraction") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  SUBCASE("core solution") {
    const Trajectory traj = integrate(phi0, 0.0, 150.0);
    const SlHom limit = extract_limit(traj);
    CHECK(hom_norm(limit - phi0) < 1e-6);
  }
  SUBCASE("time-shifted solution has the same limit") {
    const Trajectory traj = integrate(shifted_core(phi0, 1.5), 0.0, 200.0);
    const SlHom limit = extract_limit(traj);
    CHECK(hom_norm(limit - phi0) < 1e-5);
  }
  SUBCASE("short trajectories do not converge") {
    const Trajectory traj = integrate(phi0, 0.0, 0.5);
    CHECK_THROWS_AS((void)extract_limit(traj), NotConvergedError);
  }
}

TEST_CASE("conservation and flag preservation along trajectories") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const SlHom start = shifted_core(phi0, 1.2);
  const Trajectory traj = integrate(start, 0.0, 8.0);

  SUBCASE("the spectrum of ad E(t) is constant (motion stays in one orbit)") {
    auto spectrum = [&](const GVector& v) {
      Eigen::MatrixXcd ad = alg->ad_complex(v.coeffs());
      Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(ad);
      std::vector<double> out;
      for (long i = 0; i < es.eigenvalues().size(); ++i)
        out.push_back(std::abs(es.eigenvalues()[i]));
      std::sort(out.begin(), out.end());
      return out;
    };
    const auto first = spectrum(traj.front().val_e());
    for (size_t i = 0; i < traj.t.size(); i += traj.t.size() / 6 + 1) {
      const auto cur = spectrum(traj.phi[i].val_e());
      for (size_t k = 0; k < cur.size(); ++k)
        CHECK(std::abs(cur[k] - first[k]) < 1e-7);
    }
  }
  SUBCASE("theta-compatibility is preserved") {
    for (size_t i = 0; i < traj.t.size(); i += traj.t.size() / 8 + 1) {
      CHECK(traj.phi[i].is_theta_compatible(1e-8));
      CHECK(traj.phi[i].is_real(1e-8));
    }
  }
}
