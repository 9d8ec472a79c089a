#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "okb/gram.hpp"
#include "okb/quadrature.hpp"
#include "okb/util.hpp"

using namespace okb;

namespace {

double entropy(double a) {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  return a * std::log(a) + (1.0 - a) * std::log(1.0 - a);
}

}  // namespace

TEST_CASE("monomial bases over polytopes") {
  auto poly = ConvexBody::interval(0, 1);
  auto basis = MonomialBasis::over_polytope(poly, 8);
  CHECK(basis.exponents.size() == 9);
  auto p2 = ConvexBody::simplex2(1);
  auto b2 = MonomialBasis::over_polytope(p2, 3);
  CHECK(b2.exponents.size() == 10);  // (3+1)(3+2)/2
  auto b2inv = MonomialBasis::over_polytope(p2, 3, MonomialOrder::kInverseGradedLex);
  CHECK(b2inv.exponents.size() == 10);
  // Strictly sorted in the inverse graded order: degrees descend first.
  for (std::size_t i = 1; i < b2inv.exponents.size(); ++i) {
    auto d0 = b2inv.exponents[i - 1][0] + b2inv.exponents[i - 1][1];
    auto d1 = b2inv.exponents[i][0] + b2inv.exponents[i][1];
    CHECK(d0 >= d1);
  }
}

TEST_CASE("rule mass self-test") {
  auto poly = ConvexBody::interval(0, 1);
  auto rule = bm_rule(poly, 8);
  CHECK(bm_rule_mass_error(rule, poly) <= 1e-5);
}

TEST_CASE("level-0 Gram against a mass-1 measure is [1]") {
  auto poly = ConvexBody::interval(0, 1);
  auto basis = MonomialBasis::over_polytope(poly, 0);
  REQUIRE(basis.exponents.size() == 1);
  auto rule = bm_rule(poly, 1);
  for (auto& w : rule.weights) w /= rule.total_mass;
  rule.total_mass = 1.0;
  ToricWeight fs = fubini_study_weight(1);
  auto gram = gram_diagonal(basis, fs, rule);
  CHECK(gram.log_diag[0] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("dual-quadrature oracle for the k=1 Fubini-Study diagonal") {
  ToricWeight fs = fubini_study_weight(1);
  auto poly = fs.polytope;
  auto basis = MonomialBasis::over_polytope(poly, 1);
  auto rule = bm_rule(poly, 1);
  auto gram = gram_diagonal(basis, fs, rule);
  ToricWeight g0 = bm_reference_weight(poly);
  for (std::size_t i = 0; i < basis.exponents.size(); ++i) {
    double a = double(basis.exponents[i][0]);
    double oracle = std::log(integrate_adaptive(
        [&](double x) {
          return std::exp(2.0 * a * x - 2.0 * fs.eval1(x) - 2.0 * g0.eval1(x));
        },
        -34.0, 34.0, 1e-13));
    CHECK(gram.log_diag[i] == doctest::Approx(oracle).epsilon(1e-10));
  }
}

TEST_CASE("hand Schur complement: G=[[2,1],[1,1]] has log_diag [0,0]") {
  Eigen::MatrixXcd g(2, 2);
  g << 2, 1, 1, 1;
  auto fact = minimal_sections(g, MonomialOrder::kLex, 1);
  CHECK(fact.log_diag[0] == doctest::Approx(0.0));
  CHECK(fact.log_diag[1] == doctest::Approx(0.0));
  CHECK(fact.log_det() == doctest::Approx(log_det_lu(g)).epsilon(1e-12));
}

TEST_CASE("diagonal input keeps exact logs") {
  DiagonalGram g;
  g.level = 4;
  g.exponents = {{0, 0, 0}, {1, 0, 0}};
  g.log_diag = {-3.25, 7.5};
  auto fact = minimal_sections(g, MonomialOrder::kLex);
  CHECK(fact.log_diag == g.log_diag);
  CHECK(fact.diagonal_input);
}

TEST_CASE("product formula on random SPD matrices") {
  SplitMix64 rng(99);
  for (int dim : {5, 12}) {
    Eigen::MatrixXcd b(dim, dim);
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        b(i, j) = std::complex<double>(rng.uniform(-1, 1), rng.uniform(-1, 1));
    Eigen::MatrixXcd g = b * b.adjoint() + 0.2 * Eigen::MatrixXcd::Identity(dim, dim);
    auto fact = minimal_sections(g, MonomialOrder::kLex, 1);
    double oracle = log_det_lu(g);
    CHECK(std::fabs(fact.log_det() - oracle) <= 1e-9 * std::max(1.0, std::fabs(oracle)));
  }
}

TEST_CASE("dense circle Gram: SPD, product formula, both orders") {
  auto q = [](double th) { return 0.6 * std::cos(th); };
  auto g = gram_dense_circle(8, q);
  auto f_lex = minimal_sections(g, MonomialOrder::kLex, 8);
  auto f_inv = minimal_sections(g, MonomialOrder::kInverseGradedLex, 8);
  double oracle = log_det_lu(g);
  CHECK(f_lex.log_det() == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(f_inv.log_det() == doctest::Approx(oracle).epsilon(1e-10));
  CHECK(f_lex.condition_estimate >= 1.0);
}

TEST_CASE("invariant circle weight gives a diagonal dense Gram") {
  // The invariant path never computes off-diagonals by construction; the
  // dense path must reproduce that orthogonality for a constant weight.
  auto g = gram_dense_circle(6, [](double) { return 0.3; });
  for (int i = 0; i <= 6; ++i)
    for (int j = 0; j <= 6; ++j)
      if (i != j) CHECK(std::abs(g(i, j)) <= 1e-12 * std::abs(g(0, 0)));
}

TEST_CASE("upper sandwich bound is exact for probability measures") {
  ToricWeight fs = fubini_study_weight(1);
  std::int64_t k = 16;
  auto basis = MonomialBasis::over_polytope(fs.polytope, k);
  auto rule = bm_rule(fs.polytope, k);
  for (auto& w : rule.weights) w /= rule.total_mass;
  rule.total_mass = 1.0;
  auto gram = gram_diagonal(basis, fs, rule);
  for (std::size_t i = 0; i < basis.exponents.size(); ++i) {
    double a = double(basis.exponents[i][0]) / double(k);
    double f_sup = 2.0 * double(k) * legendre(fs, {a, 0});
    CHECK(gram.log_diag[i] <= f_sup + 1e-9);  // mean <= sup, ln mu(X) = 0
  }
}

TEST_CASE("numerically indefinite Gram is rejected with a condition estimate") {
  Eigen::MatrixXcd g(2, 2);
  g << 1, 2, 2, 1;
  CHECK_THROWS_AS(minimal_sections(g, MonomialOrder::kLex, 1), std::runtime_error);
}

TEST_CASE("basis recombination invariance of the determinant ratio") {
  SplitMix64 rng(4);
  auto q1 = [](double th) { return 0.6 * std::cos(th); };
  auto q2 = [](double th) { return 0.6 * std::cos(th) + 0.2 * std::sin(th); };
  auto g1 = gram_dense_circle(8, q1);
  auto g2 = gram_dense_circle(8, q2);
  int dim = 9;
  Eigen::MatrixXcd rec(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j)
      rec(i, j) = std::complex<double>(rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3));
  rec += Eigen::MatrixXcd::Identity(dim, dim);
  double r0 = log_det_lu(g1) - log_det_lu(g2);
  double r1 = log_det_lu(rec * g1 * rec.adjoint()) -
              log_det_lu(rec * g2 * rec.adjoint());
  CHECK(std::fabs(r1 - r0) <= 1e-8 * std::max(1.0, std::fabs(r0)));
}

TEST_CASE("k=200 entry matches an independent Laplace-method quadrature") {
  // Frozen oracle: trapezoid integration of the exact integrand
  // exp(200 x - 400 g(x) - 2 g0(x)) on [-40,40] with 4e5 nodes gives
  // c_200(1/2) = -0.705294723921; the closed-form limit is -ln 2 and the
  // gap is the expected (ln k)/k-scale correction.
  ToricWeight fs = fubini_study_weight(1);
  auto basis = MonomialBasis::over_polytope(fs.polytope, 200);
  auto rule = bm_rule(fs.polytope, 200);
  auto gram = gram_diagonal(basis, fs, rule);
  for (std::size_t i = 0; i < basis.exponents.size(); ++i)
    if (basis.exponents[i][0] == 100)
      CHECK(gram.log_diag[i] / 200.0 ==
            doctest::Approx(-0.705294723921).epsilon(1e-9));
}

TEST_CASE("discrete Chebyshev field converges to the closed form") {
  ToricWeight fs = fubini_study_weight(1);
  auto f64 = discrete_chebyshev_field(fs, 64);
  int i, j;
  REQUIRE(f64.nearest_node({0.5, 0}, i, j));
  CHECK(f64.value_at(i, j) == doctest::Approx(-std::log(2.0)).epsilon(0.08));
  // Error shrinks roughly like (ln k)/k.
  auto f16 = discrete_chebyshev_field(fs, 16);
  int i2, j2;
  REQUIRE(f16.nearest_node({0.5, 0}, i2, j2));
  double e16 = std::fabs(f16.value_at(i2, j2) + std::log(2.0));
  double e64 = std::fabs(f64.value_at(i, j) + std::log(2.0));
  CHECK(e64 < e16);
}

TEST_CASE("constant shift acts exactly on the discrete transform") {
  ToricWeight fs = fubini_study_weight(1);
  std::int64_t k = 24;
  auto basis = MonomialBasis::over_polytope(fs.polytope, k);
  auto rule = bm_rule(fs.polytope, k);
  auto d0 = gram_diagonal(basis, fs, rule);
  auto d1 = gram_diagonal(basis, shifted_weight(fs, 0.7), rule);
  for (std::size_t i = 0; i < d0.log_diag.size(); ++i)
    CHECK(d1.log_diag[i] ==
          doctest::Approx(d0.log_diag[i] - 0.7 * double(k)).epsilon(1e-10));
}

TEST_CASE("difference of discrete transforms stays uniformly bounded") {
  ToricWeight psi = fubini_study_weight(1);
  ToricWeight phi = perturbed_weight(psi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.2);
  double sup_diff = 0.2;  // sup |psi - phi| in weight units
  for (std::int64_t k : {8, 16, 32, 64}) {
    auto basis = MonomialBasis::over_polytope(psi.polytope, k);
    auto rule = bm_rule(psi.polytope, k);
    auto d_psi = gram_diagonal(basis, psi, rule);
    auto d_phi = gram_diagonal(basis, phi, rule);
    for (std::size_t i = 0; i < d_psi.log_diag.size(); ++i) {
      double diff = (d_psi.log_diag[i] - d_phi.log_diag[i]) / double(k);
      CHECK(std::fabs(diff) <= sup_diff + 1.0);
    }
  }
}

TEST_CASE("2d diagonal Gram factorizes over product weights") {
  auto gx = softmax_affine_term(2, {{{0, 0}, 0.0}, {{1, 0}, 0.0}}, 2.0);
  auto gy = softmax_affine_term(2, {{{0, 0}, 0.0}, {{0, 1}, 0.0}}, 2.0);
  ToricWeight box;
  box.n = 2;
  box.polytope = ConvexBody::box2(0, 1, 0, 1);
  box.g = sum_term({gx, gy}, {});
  box.convex_hint = true;
  box.growth_bound = 2.0;
  std::int64_t k = 3;
  auto basis2 = MonomialBasis::over_polytope(box.polytope, k);
  auto rule2 = bm_rule(box.polytope, k);
  auto d2 = gram_diagonal(basis2, box, rule2);
  ToricWeight fs1 = fubini_study_weight(1);
  auto basis1 = MonomialBasis::over_polytope(fs1.polytope, k);
  auto rule1 = bm_rule(fs1.polytope, k);
  auto d1 = gram_diagonal(basis1, fs1, rule1);
  auto find1 = [&](std::int64_t a) {
    for (std::size_t i = 0; i < basis1.exponents.size(); ++i)
      if (basis1.exponents[i][0] == a) return d1.log_diag[i];
    FAIL("exponent not found");
    return 0.0;
  };
  for (std::size_t i = 0; i < basis2.exponents.size(); ++i) {
    auto a = basis2.exponents[i];
    CHECK(d2.log_diag[i] ==
          doctest::Approx(find1(a[0]) + find1(a[1])).epsilon(1e-8));
  }
}

TEST_CASE("donaldson L_k: constant shift, zero, and the det-form ratio") {
  ToricWeight psi = fubini_study_weight(1);
  for (std::int64_t k : {8, 16}) {
    auto row = donaldson_lk(psi, shifted_weight(psi, 1.0), k);
    CHECK(row.sum_form == doctest::Approx(double(k + 1) / double(k)).epsilon(1e-9));
    CHECK(row.ratio == doctest::Approx(2.0).epsilon(1e-9));
    auto zero = donaldson_lk(psi, psi, k);
    CHECK(zero.sum_form == doctest::Approx(0.0));
  }
}

TEST_CASE("L_k ladder trends toward the Legendre-route energy") {
  ToricWeight psi = fubini_study_weight(1);
  ToricWeight phi = perturbed_weight(psi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.2);
  auto ladder = donaldson_ladder(psi, phi, {8, 16, 32});
  CHECK(ladder.gaps.back() < ladder.gaps.front());
  CHECK(ladder.fitted_ratio == doctest::Approx(2.0).epsilon(1e-9));
  auto csv = ladder.to_csv();
  CHECK(csv.find("lk_sum_form") != std::string::npos);
}

TEST_CASE("sandwich inequalities for Fubini-Study") {
  ToricWeight psi = fubini_study_weight(1);
  auto rep = sandwich_check(psi, 32, 0.05);
  CHECK(rep.upper_ok);
  CHECK(rep.fitted_ln_c <= 5.0);
  // The per-k normalized gap shrinks when k doubles (up to ln k factors).
  auto gap_at = [&](std::int64_t k) {
    auto basis = MonomialBasis::over_polytope(psi.polytope, k);
    auto rule = bm_rule(psi.polytope, k);
    auto gram = gram_diagonal(basis, psi, rule);
    double worst = 0.0;
    for (std::size_t i = 0; i < basis.exponents.size(); ++i) {
      double a = double(basis.exponents[i][0]) / double(k);
      double f_sup = 2.0 * double(k) * legendre(psi, {a, 0});
      worst = std::max(worst, (f_sup - gram.log_diag[i]) / double(k));
    }
    return worst;
  };
  double g32 = gap_at(32), g64 = gap_at(64);
  CHECK(g64 < g32);
  CHECK(g64 <= 0.75 * g32 + 0.05);
}
