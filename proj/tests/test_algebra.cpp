#include "doctest.h"

#include <complex>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "orbit/algebra.hpp"
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
} // namespace

TEST_CASE("built-in construction and invariants") {
  for (const auto& alg :
       {RealSemisimpleAlgebra::sl(2), RealSemisimpleAlgebra::sl(3),
        RealSemisimpleAlgebra::sl(4), RealSemisimpleAlgebra::su(1, 1),
        RealSemisimpleAlgebra::su(2, 1), RealSemisimpleAlgebra::so(2, 1),
        RealSemisimpleAlgebra::so(3, 2)}) {
    CAPTURE(alg->name());
    CHECK_NOTHROW(alg->check_invariants(1e-12));
  }
  CHECK(RealSemisimpleAlgebra::sl(2)->dim() == 3);
  CHECK(RealSemisimpleAlgebra::sl(3)->dim() == 8);
  CHECK(RealSemisimpleAlgebra::su(2, 1)->dim() == 8);
  CHECK(RealSemisimpleAlgebra::so(3, 2)->dim() == 10);

  CHECK_THROWS_AS((void)RealSemisimpleAlgebra::sl(1), InvalidParameterError);
  CHECK_THROWS_AS((void)RealSemisimpleAlgebra::su(1, 0), InvalidParameterError);
  CHECK_THROWS_AS((void)RealSemisimpleAlgebra::so(1, 1), InvalidParameterError);
}

TEST_CASE("bracket matches the sl(2)/sl(3) matrix commutator oracle") {
  auto sl2 = RealSemisimpleAlgebra::sl(2);
  const GVector e = named(sl2, "E12"), f = named(sl2, "E21"), h = named(sl2, "H1");
  CHECK(norm(bracket(h, e) - 2.0 * e) < 1e-14);
  CHECK(norm(bracket(h, f) + 2.0 * f) < 1e-14);
  CHECK(norm(bracket(e, f) - h) < 1e-14);

  auto sl3 = RealSemisimpleAlgebra::sl(3);
  SUBCASE("E12, E23 -> E13") {
    const GVector b = bracket(named(sl3, "E12"), named(sl3, "E23"));
    CHECK(norm(b - named(sl3, "E13")) < 1e-14);
  }
  SUBCASE("all basis pairs against the oracle") {
    for (int i = 0; i < sl3->dim(); ++i)
      for (int j = 0; j < sl3->dim(); ++j) {
        const Eigen::MatrixXd mi = oracle::sl_matrix(3, sl3->basis_names()[i]);
        const Eigen::MatrixXd mj = oracle::sl_matrix(3, sl3->basis_names()[j]);
        const Eigen::VectorXd expect =
            oracle::sl_matrix_coeffs(sl3, oracle::commutator(mi, mj), 3);
        const GVector got = bracket(GVector::basis(sl3, i), GVector::basis(sl3, j));
        CHECK((got.re() - expect).cwiseAbs().maxCoeff() < 1e-12);
      }
  }
  SUBCASE("[x,x] = 0") {
    std::mt19937_64 rng(7);
    for (int rep = 0; rep < 5; ++rep) {
      const GVector x = oracle::random_real(sl3, rng);
      CHECK(norm(bracket(x, x)) < 1e-13);
    }
  }
}

TEST_CASE("Jacobi residual below 1e-12 on all basis triples") {
  for (const auto& alg : {RealSemisimpleAlgebra::sl(3), RealSemisimpleAlgebra::su(2, 1)}) {
    double worst = 0.0;
    for (int i = 0; i < alg->dim(); ++i)
      for (int j = i + 1; j < alg->dim(); ++j)
        for (int k = j + 1; k < alg->dim(); ++k) {
          const GVector bi = GVector::basis(alg, i), bj = GVector::basis(alg, j),
                        bk = GVector::basis(alg, k);
          const GVector r = bracket(bracket(bi, bj), bk) + bracket(bracket(bj, bk), bi) +
                            bracket(bracket(bk, bi), bj);
          worst = std::max(worst, r.coeffs().cwiseAbs().maxCoeff());
        }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("killing form on normalized sl(2,R) equals the trace form") {
  auto alg = normalized_sl2();
  const GVector e = named(alg, "E12"), f = named(alg, "E21"), h = named(alg, "H1");
  // Trace-form oracle on 2x2 matrices: tr(h h) = 2, tr(e f) = 1, tr(e e) = 0.
  CHECK(killing(h, h).real() == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(killing(e, f).real() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(killing(e, e)) < 1e-13);
  // The raw Killing form of sl(2) is 4x the trace form.
  auto raw = RealSemisimpleAlgebra::sl(2);
  CHECK(killing(named(raw, "H1"), named(raw, "H1")).real() ==
        doctest::Approx(8.0).epsilon(1e-12));
  CHECK(alg->killing_scale() == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("inner product: positivity, k-p orthogonality, fixture norm") {
  auto alg = normalized_sl2();
  const GVector e = named(alg, "E12"), f = named(alg, "E21"), h = named(alg, "H1");
  CHECK(inner(e, e).real() == doctest::Approx(1.0).epsilon(1e-12));

  std::mt19937_64 rng(11);
  for (const auto& a : {RealSemisimpleAlgebra::sl(3), RealSemisimpleAlgebra::su(2, 1)}) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a->inner_gram());
    CHECK(es.eigenvalues().minCoeff() > 0.0);
    for (int rep = 0; rep < 4; ++rep)
      CHECK(std::abs(inner(oracle::random_k(a, rng), oracle::random_p(a, rng))) < 1e-10);
  }

  SUBCASE("|s h + i e + i s^2 f| = 1 + s^2") {
    const double s = 0.5;
    const GVector z = s * h + kI * e + kI * (s * s) * f;
    CHECK(norm(z) == doctest::Approx(1.25).epsilon(1e-12));
  }
}

TEST_CASE("ad is inner-skew for k and inner-symmetric for p") {
  auto alg = RealSemisimpleAlgebra::sl(3);
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 6; ++rep) {
    const GVector u = oracle::random_real(alg, rng), v = oracle::random_real(alg, rng);
    const GVector xk = oracle::random_k(alg, rng);
    const GVector xp = oracle::random_p(alg, rng);
    CHECK(std::abs(inner(bracket(xk, u), v) + inner(u, bracket(xk, v))) < 1e-9);
    CHECK(std::abs(inner(bracket(xp, u), v) - inner(u, bracket(xp, v))) < 1e-9);
  }
}

TEST_CASE("cartan split") {
  auto alg = normalized_sl2();
  const GVector e = named(alg, "E12"), f = named(alg, "E21"), h = named(alg, "H1");
  auto [ke, pe] = cartan_split(e);
  CHECK(norm(ke - 0.5 * (e - f)) < 1e-13);
  CHECK(norm(pe - 0.5 * (e + f)) < 1e-13);
  auto [kh, ph] = cartan_split(h);
  CHECK(norm(kh) < 1e-13);
  CHECK(norm(ph - h) < 1e-13);
  auto [kz, pz] = cartan_split(GVector::zero(alg));
  CHECK(norm(kz) < 1e-15);
  CHECK(norm(pz) < 1e-15);
  CHECK(ke.is_k_valued());
  CHECK(pe.is_p_valued());
}

TEST_CASE("algebra JSON round trip is bitwise on the structure table") {
  namespace fs = std::filesystem;
  auto alg = RealSemisimpleAlgebra::su(2, 1);
  const fs::path path = fs::temp_directory_path() / "orbit_test_su21.json";
  alg->save_json(path.string());
  auto back = RealSemisimpleAlgebra::load_json(path.string());
  REQUIRE(back->dim() == alg->dim());
  REQUIRE(back->brackets().size() == alg->brackets().size());
  for (size_t i = 0; i < alg->brackets().size(); ++i) {
    CHECK(back->brackets()[i].i == alg->brackets()[i].i);
    CHECK(back->brackets()[i].j == alg->brackets()[i].j);
    CHECK(back->brackets()[i].k == alg->brackets()[i].k);
    CHECK(back->brackets()[i].c == alg->brackets()[i].c);  // exact
  }
  CHECK((back->theta_matrix() - alg->theta_matrix()).cwiseAbs().maxCoeff() == 0.0);
  fs::remove(path);

  SUBCASE("malformed JSON raises IoError") {
    const fs::path bad = fs::temp_directory_path() / "orbit_test_bad.json";
    std::ofstream(bad) << "{\"dim\": 3, \"brackets\": \"nope\"}";
    CHECK_THROWS_AS((void)RealSemisimpleAlgebra::load_json(bad.string()), IoError);
    fs::remove(bad);
  }
}

TEST_CASE("element JSON round trip") {
  auto alg = RealSemisimpleAlgebra::sl(2);
  std::mt19937_64 rng(3);
  GVector v = oracle::random_real(alg, rng) + kI * oracle::random_real(alg, rng);
  const GVector back = element_from_json_string(alg, element_to_json_string(v));
  CHECK((back.coeffs() - v.coeffs()).norm() == 0.0);
}

TEST_CASE("identity tokens: elements of different instances do not mix") {
  auto a1 = RealSemisimpleAlgebra::sl(2);
  auto a2 = a1->with_killing_scale(0.25);
  const GVector x = named(a1, "E12");
  const GVector y = named(a2, "E12");
  CHECK_THROWS_AS((void)bracket(x, y), AlgebraMismatchError);
  CHECK_NOTHROW((void)bracket(x.rebind(a2), y));
}

TEST_CASE("nilpotency and adjoint exponential") {
  auto alg = RealSemisimpleAlgebra::sl(3);
  const GVector e12 = named(alg, "E12"), e23 = named(alg, "E23");
  CHECK(is_ad_nilpotent(e12 + e23, 1e-10));
  CHECK_FALSE(is_ad_nilpotent(named(alg, "H1"), 1e-6));
  // exp(ad a) is a Lie algebra automorphism.
  std::mt19937_64 rng(5);
  const GVector a = oracle::random_real(alg, rng, 0.4);
  const GVector x = oracle::random_real(alg, rng), y = oracle::random_real(alg, rng);
  const GVector lhs = adjoint_exp(a, bracket(x, y));
  const GVector rhs = bracket(adjoint_exp(a, x), adjoint_exp(a, y));
  CHECK(norm(lhs - rhs) < 1e-9 * (1.0 + norm(lhs)));
}
