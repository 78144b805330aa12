#include "doctest.h"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <complex>
#include <random>

#include "oracles.hpp"
#include "orbit/moment.hpp"
#include "orbit/sl2.hpp"

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

struct OrbitContext {
  AlgebraPtr alg;
  SlHom phi0;
  IsotypicDecomposition iso;
};

OrbitContext sl3_orbit(const GVector& seed_raw) {
  const Sl2Triple t = jacobson_morozov(seed_raw);
  auto alg = normalize_for_orbit(t);
  const Sl2Triple tn =
      strictly_normal_from_critical(descend_to_core(seed_raw.rebind(alg)).core);
  SlHom phi0 = SlHom::from_triple(tn);
  IsotypicDecomposition iso = isotypic(phi0);
  return {alg, phi0, std::move(iso)};
}

OrbitContext regular_sl3() {
  auto raw = RealSemisimpleAlgebra::sl(3);
  return sl3_orbit(named(raw, "E12") + named(raw, "E23"));
}

OrbitContext minimal_sl3() {
  auto raw = RealSemisimpleAlgebra::sl(3);
  return sl3_orbit(named(raw, "E13"));
}

std::vector<double> sorted_ad_spectrum(const GVector& h) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(h.algebra()->ad_real(h.re()));
  std::vector<double> ev(static_cast<size_t>(es.eigenvalues().size()));
  for (size_t i = 0; i < ev.size(); ++i)
    ev[i] = es.eigenvalues()[static_cast<long>(i)].real();
  std::sort(ev.begin(), ev.end());
  return ev;
}

} // namespace

TEST_CASE("jacobson_morozov on the defining sl(2) triple") {
  auto alg = RealSemisimpleAlgebra::sl(2);
  const Sl2Triple t = jacobson_morozov(named(alg, "E12"));
  CHECK(t.relation_residual() < 1e-9);
  CHECK(norm(t.e - named(alg, "E12")) == 0.0);
  CHECK(norm(t.f - named(alg, "E21")) < 1e-9);
  CHECK(norm(t.h - named(alg, "H1")) < 1e-9);
}

TEST_CASE("jacobson_morozov on the regular nilpotent of sl(3,R)") {
  auto alg = RealSemisimpleAlgebra::sl(3);
  const GVector zeta = named(alg, "E12") + named(alg, "E23");
  const Sl2Triple t = jacobson_morozov(zeta);
  CHECK(t.relation_residual() < 1e-9);
  // h is conjugate to diag(2,0,-2): ad-spectrum {0,0,+-2,+-2,+-4}.
  const auto spec = sorted_ad_spectrum(t.h);
  const std::vector<double> expect{-4, -2, -2, 0, 0, 2, 2, 4};
  REQUIRE(spec.size() == expect.size());
  for (size_t i = 0; i < expect.size(); ++i)
    CHECK(spec[i] == doctest::Approx(expect[i]).epsilon(1e-8));
  // Matrix-level oracle: [h, zeta] = 2 zeta on 3x3 matrices.
  const Eigen::MatrixXd hm = oracle::sl_element_matrix(alg, t.h.re(), 3);
  const Eigen::MatrixXd zm = oracle::sl_element_matrix(alg, zeta.re(), 3);
  CHECK((oracle::commutator(hm, zm) - 2.0 * zm).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("jacobson_morozov rejects zero and non-nilpotent input") {
  auto alg = RealSemisimpleAlgebra::sl(2);
  CHECK_THROWS_AS((void)jacobson_morozov(GVector::zero(alg)), ZeroElementError);
  CHECK_THROWS_AS((void)jacobson_morozov(named(alg, "H1")), NotNilpotentError);
}

TEST_CASE("strictly normal triple from a critical point") {
  auto alg = normalized_sl2();
  const GVector e = named(alg, "E12"), f = named(alg, "E21"), h = named(alg, "H1");
  SUBCASE("e maps to the standard triple with c = 1") {
    const Sl2Triple t = strictly_normal_from_critical(e);
    CHECK(norm(t.e - e) < 1e-12);
    CHECK(norm(t.f - f) < 1e-12);
    CHECK(norm(t.h - h) < 1e-12);
    CHECK(t.is_strictly_normal());
  }
  SUBCASE("3e rescales back to the standard triple") {
    const Sl2Triple t = strictly_normal_from_critical(3.0 * e);
    CHECK(norm(t.e - e) < 1e-12);
    CHECK(norm(t.h - h) < 1e-12);
  }
  SUBCASE("h is rejected") {
    CHECK_THROWS_AS((void)strictly_normal_from_critical(h), NotCriticalError);
  }
}

TEST_CASE("normalize_for_orbit fixes killing(h,h) = 2 and is idempotent") {
  auto raw = RealSemisimpleAlgebra::sl(2);
  Sl2Triple t{named(raw, "E12"), named(raw, "E21"), named(raw, "H1")};
  auto alg = normalize_for_orbit(t);
  CHECK(alg->killing_scale() == doctest::Approx(0.25).epsilon(1e-14));
  auto again = normalize_for_orbit(t.rebind(alg));
  CHECK(again->killing_scale() == doctest::Approx(alg->killing_scale()).epsilon(1e-14));

  SUBCASE("sl(3,R) regular triple: raw B(h,h) = 48") {
    auto r3 = regular_sl3();
    const GVector h = r3.phi0.val_h();
    CHECK(killing(h, h).real() == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(r3.alg->killing_scale() == doctest::Approx(2.0 / 48.0).epsilon(1e-8));
  }
}

TEST_CASE("isotypic decomposition of sl(2,R): one isotype of highest weight 2") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const IsotypicDecomposition iso = isotypic(phi0);
  CHECK(iso.occurring_r() == std::vector<int>{2});
  CHECK(iso.dim_of_r(2) == 3);
  for (int l : {-2, 0, 2}) {
    REQUIRE(iso.piece(2, l) != nullptr);
    CHECK(iso.piece(2, l)->basis.cols() == 1);
  }
}

TEST_CASE("isotypic decomposition of sl(3,R)") {
  SUBCASE("regular: g = g(2) + g(4), dims 3 + 5") {
    auto r3 = regular_sl3();
    CHECK(r3.iso.occurring_r() == std::vector<int>{2, 4});
    CHECK(r3.iso.dim_of_r(2) == 3);
    CHECK(r3.iso.dim_of_r(4) == 5);
  }
  SUBCASE("minimal: dims of g(2), g(1), g(0) are 3, 4, 1") {
    auto m3 = minimal_sl3();
    CHECK(m3.iso.occurring_r() == std::vector<int>{0, 1, 2});
    CHECK(m3.iso.dim_of_r(2) == 3);
    CHECK(m3.iso.dim_of_r(1) == 4);
    CHECK(m3.iso.dim_of_r(0) == 1);
  }
}

TEST_CASE("isotypic invariants: completeness, theta-stability, weights") {
  for (auto& ctx : {regular_sl3(), minimal_sl3()}) {
    int total = 0;
    for (const auto& p : ctx.iso.pieces()) total += static_cast<int>(p.basis.cols());
    CHECK(total == ctx.alg->dim());
    for (const auto& p : ctx.iso.pieces()) {
      const auto* mirror = ctx.iso.piece(p.r, -p.l);
      REQUIRE(mirror != nullptr);
      const Eigen::MatrixXd proj =
          mirror->basis * mirror->basis.transpose() * ctx.alg->inner_gram();
      const Eigen::MatrixXd mapped = ctx.alg->theta_matrix() * p.basis;
      CHECK((proj * mapped - mapped).cwiseAbs().maxCoeff() < 1e-9);
    }
    const Eigen::MatrixXd ad_h = ctx.alg->ad_real(ctx.phi0.val_h().re());
    for (const auto& p : ctx.iso.pieces())
      CHECK((ad_h * p.basis - p.l * p.basis).cwiseAbs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("diagonal components of Hom(s, g(r))") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const IsotypicDecomposition iso = isotypic(phi0);

  SUBCASE("a morphism is its own diagonal-invariant part") {
    const SlHom p = hom_diag_component(phi0, phi0, iso, 2, 0);
    CHECK(hom_norm(p - phi0) < 1e-10);
  }
  SUBCASE("the three projections resolve the identity on Hom(s,g(r))") {
    std::mt19937_64 rng(17);
    const SlHom t(oracle::random_real(alg, rng), oracle::random_real(alg, rng),
                  oracle::random_real(alg, rng));
    SlHom sum = hom_diag_component(t, phi0, iso, 2, 0);
    sum += hom_diag_component(t, phi0, iso, 2, 2);
    sum += hom_diag_component(t, phi0, iso, 2, 4);
    CHECK(hom_norm(sum - t) < 1e-9 * (1.0 + hom_norm(t)));
  }
  SUBCASE("lowest diagonal type satisfies the membership identity") {
    std::mt19937_64 rng(19);
    const SlHom t(oracle::random_real(alg, rng), oracle::random_real(alg, rng),
                  oracle::random_real(alg, rng));
    const SlHom low = hom_diag_component(t, phi0, iso, 2, 0);
    CHECK(membership_residual(low, phi0, 2) < 1e-10);
  }
  SUBCASE("Hom^{R,theta}(s, g(2))(0) of sl(2,R) has dimension 1") {
    // Brute-force nullspace of the membership condition over the
    // (value-on-e, value-on-h) coordinates of Hom^{R,theta}.
    const int d = alg->dim();
    const int np = static_cast<int>(alg->p_basis().cols());
    auto from_coords = [&](const Eigen::VectorXd& x) {
      GVector e = GVector::from_real(alg, x.head(d));
      GVector h = GVector::from_real(alg, alg->p_basis() * x.tail(np));
      return SlHom(e, -e.theta(), h);
    };
    const int n = d + np;
    Eigen::MatrixXd cond(3 * d, n);
    for (int c = 0; c < n; ++c) {
      const SlHom t = from_coords(Eigen::VectorXd::Unit(n, c));
      const GVector re = 4.0 * t.val_e() + bracket(phi0.val_e(), t.val_h()) -
                         bracket(phi0.val_h(), t.val_e());
      const GVector rf = 4.0 * t.val_f() - bracket(phi0.val_f(), t.val_h()) +
                         bracket(phi0.val_h(), t.val_f());
      const GVector rh = 4.0 * t.val_h() - 2.0 * bracket(phi0.val_e(), t.val_f()) +
                         2.0 * bracket(phi0.val_f(), t.val_e());
      Eigen::VectorXd col(3 * d);
      col << re.re(), rf.re(), rh.re();
      cond.col(c) = col;
    }
    CHECK(linalg::nullspace(cond, 1e-9).cols() == 1);
  }
}

TEST_CASE("phi_from_xi") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const IsotypicDecomposition iso = isotypic(phi0);
  const GVector e = named(alg, "E12"), h = named(alg, "H1");

  SUBCASE("xi = h gives eta = 0, Phi(h) = -2h, Phi(e) = -2e") {
    auto [phi, eta] = phi_from_xi(h, phi0, iso, 2);
    CHECK(norm(eta) < 1e-12);
    CHECK(norm(phi.val_h() + 2.0 * h) < 1e-12);
    CHECK(norm(phi.val_e() + 2.0 * e) < 1e-12);
    CHECK(membership_residual(phi, phi0, 2) < 1e-10);
  }
  SUBCASE("xi = 0 gives the zero map") {
    auto [phi, eta] = phi_from_xi(GVector::zero(alg), phi0, iso, 2);
    CHECK(hom_norm(phi) < 1e-14);
    CHECK(norm(eta) < 1e-14);
  }
  SUBCASE("r = 0 and stray components are rejected") {
    CHECK_THROWS_AS((void)phi_from_xi(h, phi0, iso, 0), InvalidParameterError);
    auto m3 = minimal_sl3();
    std::mt19937_64 rng(29);
    // A p-vector with a g(1) component is not allowed for r = 2.
    GVector v = oracle::random_p(m3.alg, rng);
    GVector bad(m3.alg,
                (m3.iso.projector_r(2) + 0.3 * m3.iso.projector_r(1)) * v.coeffs());
    bad = 0.5 * (bad - bad.theta());
    REQUIRE(norm(bad - m3.iso.project_r(bad, 2)) > 1e-6);
    CHECK_THROWS_AS((void)phi_from_xi(bad, m3.phi0, m3.iso, 2), ValidationError);
  }
  SUBCASE("the value at e determines the map") {
    auto r3 = regular_sl3();
    const Eigen::MatrixXd p_proj =
        0.5 * (Eigen::MatrixXd::Identity(8, 8) - r3.alg->theta_matrix());
    const Eigen::MatrixXd basis =
        r3.alg->inner_orthonormalize(p_proj * r3.iso.projector_r(4), 1e-10);
    REQUIRE(basis.cols() > 0);
    const GVector xi = GVector::from_real(r3.alg, basis.col(0));
    auto [phi, eta] = phi_from_xi(xi, r3.phi0, r3.iso, 4);
    // Phi(e) = [e, xi] + [e, eta] recovers [e, xi].
    const GVector recon = phi.val_e() - bracket(r3.phi0.val_e(), eta);
    CHECK(norm(recon - bracket(r3.phi0.val_e(), xi)) < 1e-9);
  }
}

TEST_CASE("normal space basis complements [e,k] inside [e,g]") {
  auto check_complement = [](const AlgebraPtr& alg, const SlHom& phi0,
                             const IsotypicDecomposition& iso, int expected_dim) {
    const auto basis = normal_space_basis(phi0, iso);
    CHECK(static_cast<int>(basis.size()) == expected_dim);
    const int d = alg->dim();
    const Eigen::MatrixXd ad_e = alg->ad_real(phi0.val_e().re());
    const Eigen::MatrixXd ek = ad_e * alg->k_basis();
    const Eigen::MatrixXd eg = ad_e * Eigen::MatrixXd::Identity(d, d);
    Eigen::MatrixXd img(d, static_cast<int>(basis.size()));
    for (size_t c = 0; c < basis.size(); ++c)
      img.col(static_cast<long>(c)) = basis[c].val_e().re();

    const auto rank = [](const Eigen::MatrixXd& m) {
      return linalg::orthonormal_columns(m, 1e-9).cols();
    };
    Eigen::MatrixXd joint(d, ek.cols() + img.cols());
    joint << ek, img;
    CHECK(rank(joint) == rank(eg));
    CHECK(rank(joint) == rank(ek) + rank(img));
    CHECK(rank(img) == static_cast<int>(basis.size()));
    CHECK(linalg::smallest_principal_angle(ek, img) > 1e-6);
    return basis;
  };

  SUBCASE("sl(2,R): one radial direction") {
    auto alg = normalized_sl2();
    const SlHom phi0 = identity_embedding(alg);
    const auto basis = check_complement(alg, phi0, isotypic(phi0), 1);
    // The only normal direction is the scaling direction through phi0.
    CHECK(std::abs(std::abs(hom_inner(basis[0], phi0).real()) - 1.0) < 1e-9);
  }
  SUBCASE("sl(3,R) regular: dim = dim[e,g] - dim[e,k]") {
    auto r3 = regular_sl3();
    const Eigen::MatrixXd ad_e = r3.alg->ad_real(r3.phi0.val_e().re());
    const auto rank = [](const Eigen::MatrixXd& m) {
      return linalg::orthonormal_columns(m, 1e-9).cols();
    };
    const int expected =
        static_cast<int>(rank(ad_e * Eigen::MatrixXd::Identity(8, 8)) -
                         rank(ad_e * r3.alg->k_basis()));
    check_complement(r3.alg, r3.phi0, r3.iso, expected);
  }
  SUBCASE("sl(3,R) minimal") {
    auto m3 = minimal_sl3();
    const Eigen::MatrixXd ad_e = m3.alg->ad_real(m3.phi0.val_e().re());
    const auto rank = [](const Eigen::MatrixXd& m) {
      return linalg::orthonormal_columns(m, 1e-9).cols();
    };
    const int expected =
        static_cast<int>(rank(ad_e * Eigen::MatrixXd::Identity(8, 8)) -
                         rank(ad_e * m3.alg->k_basis()));
    check_complement(m3.alg, m3.phi0, m3.iso, expected);
  }
}

TEST_CASE("a strictly normal morphism is an isometry for the trace form") {
  for (auto& ctx : {regular_sl3(), minimal_sl3()}) {
    const SlHom& p = ctx.phi0;
    CHECK(inner(p.val_e(), p.val_e()).real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inner(p.val_f(), p.val_f()).real() == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(inner(p.val_h(), p.val_h()).real() == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(std::abs(inner(p.val_e(), p.val_f())) < 1e-9);
    CHECK(std::abs(inner(p.val_e(), p.val_h())) < 1e-9);
    CHECK(std::abs(inner(p.val_f(), p.val_h())) < 1e-9);
  }
}

TEST_CASE("triple relation residuals stay below 1e-9 on rotated seeds") {
  std::mt19937_64 rng(31);
  auto alg = RealSemisimpleAlgebra::sl(3);
  const GVector seed = named(alg, "E12") + named(alg, "E23");
  for (int rep = 0; rep < 5; ++rep) {
    const GVector moved = adjoint_exp(oracle::random_real(alg, rng, 0.3), seed);
    const Sl2Triple t = jacobson_morozov(moved);
    CHECK(t.relation_residual() < 1e-9 * (1.0 + norm(moved)));
  }
}

TEST_CASE("SlHom JSON round trip") {
  auto alg = normalized_sl2();
  const SlHom phi0 = identity_embedding(alg);
  const SlHom back = hom_from_json_string(alg, hom_to_json_string(phi0));
  CHECK(hom_norm(back - phi0) == 0.0);
}
