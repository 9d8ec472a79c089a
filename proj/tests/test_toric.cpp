#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "okb/toric.hpp"
#include "okb/util.hpp"

using namespace okb;

namespace {

double entropy(double a) {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  return a * std::log(a) + (1.0 - a) * std::log(1.0 - a);
}

ToricWeight quadratic_toy() {
  ToricWeight w;
  w.n = 1;
  w.polytope = ConvexBody::interval(-10, 10);
  w.g = quadratic_term(1, 1.0);
  w.convex_hint = true;
  w.growth_bound = 1.0;  // deliberately wrong: growth check must fail
  w.name = "quadratic";
  return w;
}

}  // namespace

TEST_CASE("legendre closed forms") {
  // Self-dual quadratic, evaluated with an explicit search box.
  auto quad = quadratic_toy();
  SearchBox box{{-6, -6}, {6, 6}};
  for (double p : {-0.8, 0.0, 0.7, 2.5})
    CHECK(legendre(quad, {p, 0}, box) == doctest::Approx(p * p / 2).epsilon(1e-8));

  // Fubini-Study: stationary point e^{2x} = a/(1-a) gives half the entropy.
  auto fs = fubini_study_weight(1);
  for (double a : {0.1, 0.25, 0.5, 0.8, 0.9})
    CHECK(legendre(fs, {a, 0}) == doctest::Approx(0.5 * entropy(a)).epsilon(1e-8));

  // Support function of [0,1]: the conjugate vanishes on the polytope.
  auto ma = max_affine_weight(1, {{{0, 0}, 0.0}, {{1, 0}, 0.0}});
  CHECK(legendre(ma, {0.5, 0}) == doctest::Approx(0.0).epsilon(1e-9));

  CHECK_THROWS_AS(legendre(fs, {1.5, 0}), std::invalid_argument);
}

TEST_CASE("chebyshev transform of Fubini-Study is the entropy") {
  auto fs = fubini_study_weight(1);
  auto field = chebyshev_toric(fs, 50, 2);
  for (int i = 0; i < field.grid.counts[0]; ++i) {
    if (field.state[field.index(i)] != NodeState::kPresent) continue;
    double a = field.node_coord(i)[0];
    CHECK(field.value_at(i) == doctest::Approx(entropy(a)).epsilon(1e-6));
  }
}

TEST_CASE("2d transform of Fubini-Study on the simplex matches the entropy") {
  auto fs2 = fubini_study_weight(2);
  auto field = chebyshev_toric(fs2, 24, 2);
  auto closed = [](double p1, double p2) {
    double r = 1.0 - p1 - p2;
    return p1 * std::log(p1) + p2 * std::log(p2) + r * std::log(r);
  };
  int present = 0;
  for (int j = 0; j < field.grid.counts[1]; ++j)
    for (int i = 0; i < field.grid.counts[0]; ++i) {
      if (field.state[field.index(i, j)] != NodeState::kPresent) continue;
      auto p = field.node_coord(i, j);
      CHECK(field.value_at(i, j) ==
            doctest::Approx(closed(p[0], p[1])).epsilon(1e-6));
      ++present;
    }
  CHECK(present > 50);
  CHECK(field.audit_convexity(1e-8).pass);
  // CSV carries both coordinates plus value and missing flag.
  auto csv = field.to_csv();
  CHECK(csv.rfind("alpha1,alpha2,value,missing", 0) == 0);
}

TEST_CASE("constant shift moves the transform by -C") {
  auto fs = fubini_study_weight(1);
  auto shifted = shifted_weight(fs, 0.37);
  auto f0 = chebyshev_toric(fs, 40, 2);
  auto f1 = chebyshev_toric(shifted, 40, 2);
  for (std::size_t i = 0; i < f0.node_count(); ++i)
    if (f0.state[i] == NodeState::kPresent)
      CHECK(f1.values[i] == doctest::Approx(f0.values[i] - 0.37).epsilon(1e-9));
}

TEST_CASE("homogeneity: c[m psi](m p) = m c[psi](p)") {
  auto fs = fubini_study_weight(1);
  auto fs2 = scaled_weight(fs, 2.0);
  for (double a : {0.2, 0.5, 0.8})
    CHECK(2.0 * legendre(fs2, {2.0 * a, 0}) ==
          doctest::Approx(2.0 * 2.0 * legendre(fs, {a, 0})).epsilon(1e-8));
}

TEST_CASE("growth and convexity validation") {
  auto fs = fubini_study_weight(1);
  CHECK(validate_growth(fs).ok);
  CHECK(validate_convexity(fs));
  auto quad = quadratic_toy();
  CHECK_FALSE(validate_growth(quad).ok);
  CHECK_THROWS_AS(chebyshev_toric(quad, 40, 2), std::invalid_argument);
  auto bumped = perturbed_weight(fs, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.8);
  CHECK_FALSE(validate_convexity(bumped));
}

TEST_CASE("psh projection fixes convex weights and envelopes bumps") {
  auto fs = fubini_study_weight(1);
  auto proj = psh_projection_toric(fs);
  CHECK(proj.projected);
  for (double x = -6; x <= 6; x += 0.5)
    CHECK(proj.eval1(x) == doctest::Approx(fs.eval1(x)).epsilon(1e-6));

  // Positive bump: projection stays below the weight and agrees away from
  // the bump region; an independent grid hull is the oracle.
  auto bumped = perturbed_weight(fs, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.8);
  auto pb = psh_projection_toric(bumped);
  CHECK(pb.projected);
  CHECK(validate_convexity(pb));
  for (double x = -8; x <= 8; x += 0.05)
    CHECK(pb.eval1(x) <= bumped.eval1(x) + 1e-6);
  for (double x : {-8.0, -5.0, 5.0, 8.0})
    CHECK(pb.eval1(x) == doctest::Approx(bumped.eval1(x)).epsilon(1e-5));
  {
    // Independent envelope oracle on a different grid.
    int n = 16001;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = -16.0 + 32.0 * i / (n - 1);
      ys[i] = bumped.eval1(xs[i]);
    }
    std::vector<int> hull;
    for (int i = 0; i < n; ++i) {
      while (hull.size() >= 2) {
        int a = hull[hull.size() - 2], b = hull.back();
        if ((ys[b] - ys[a]) / (xs[b] - xs[a]) >= (ys[i] - ys[b]) / (xs[i] - xs[b]))
          hull.pop_back();
        else
          break;
      }
      hull.push_back(i);
    }
    for (int t = 0; t < int(hull.size()); t += 50) {
      double x = xs[hull[std::size_t(t)]];
      CHECK(pb.eval1(x) == doctest::Approx(ys[hull[std::size_t(t)]]).epsilon(1e-4));
    }
  }

  // Double well through a negative bump: the envelope bridges the dip.
  auto well = perturbed_weight(fs, quadratic_bump_term(1, {0, 0}, 1.0, -1.0), 0.8);
  auto pw = psh_projection_toric(well);
  CHECK(validate_convexity(pw));
  for (double x = -3; x <= 3; x += 0.1) CHECK(pw.eval1(x) <= well.eval1(x) + 1e-6);
}

TEST_CASE("projection idempotence") {
  auto fs = fubini_study_weight(1);
  auto bumped = perturbed_weight(fs, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.4);
  auto p1 = psh_projection_toric(bumped);
  auto p2 = psh_projection_toric(p1);
  for (double x = -5; x <= 5; x += 0.1)
    CHECK(p2.eval1(x) == doctest::Approx(p1.eval1(x)).epsilon(1e-8));
}

TEST_CASE("MA pushforward densities") {
  // Fubini-Study: density 2 e^{2x} / (1 + e^{2x})^2, mass 1.
  auto fs = fubini_study_weight(1);
  auto mu = ma_pushforward_1d(fs);
  CHECK(mu.total_mass == doctest::Approx(1.0).epsilon(1e-6));
  auto fs_density = [](double x) {
    double e = std::exp(2 * x);
    return 2 * e / ((1 + e) * (1 + e));
  };
  for (double x : {-2.0, 0.0, 1.0}) {
    std::size_t i = std::size_t((x - mu.xs.front()) / mu.grid_h + 0.5);
    CHECK(mu.density[i] == doctest::Approx(fs_density(mu.xs[i])).epsilon(1e-5));
  }

  // Quadratic core matched to [0,1]: density 1 on the bulk.
  auto cq = capped_quadratic_weight(0, 1);
  auto mu2 = ma_pushforward_1d(cq);
  CHECK(mu2.total_mass == doctest::Approx(1.0).epsilon(1e-6));
  for (double x : {0.2, 0.5, 0.8}) {
    std::size_t i = std::size_t((x - mu2.xs.front()) / mu2.grid_h + 0.5);
    CHECK(mu2.density[i] == doctest::Approx(1.0).epsilon(1e-6));
  }

  // Piecewise affine: point masses at the kinks, total mass = |Delta|.
  auto pl = max_affine_weight(1, {{{0, 0}, 0.0}, {{0.4, 0}, -0.1}, {{1, 0}, -0.8}});
  auto mu3 = ma_pushforward_1d(pl);
  CHECK(mu3.atoms.size() == 2);
  CHECK(mu3.atoms[0].second == doctest::Approx(0.4));
  CHECK(mu3.atoms[1].second == doctest::Approx(0.6));
  CHECK(mu3.total_mass == doctest::Approx(1.0));
}

TEST_CASE("energies: volume identity, zero, antisymmetry, cocycle, scaling") {
  auto psi = fubini_study_weight(1);
  auto phi1 = shifted_weight(psi, 1.0);
  CHECK(energy_legendre(psi, phi1).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(energy_ma_1d(psi, phi1).value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(energy_legendre(psi, psi).value == doctest::Approx(0.0));
  CHECK(energy_ma_1d(psi, psi).value == doctest::Approx(0.0));

  auto phi = perturbed_weight(psi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.2);
  double el = energy_legendre(psi, phi).value;
  double em = energy_ma_1d(psi, phi).value;
  CHECK(std::fabs(el - em) <= 1e-3);
  CHECK(energy_legendre(phi, psi).value == doctest::Approx(-el).epsilon(1e-12));

  auto chi = shifted_weight(psi, 0.4);
  double cocycle = energy_legendre(psi, phi).value + energy_legendre(phi, chi).value +
                   energy_legendre(chi, psi).value;
  CHECK(std::fabs(cocycle) <= 1e-5);

  double e1 = energy_legendre(psi, phi).value;
  double e2 = energy_legendre(scaled_weight(psi, 2.0), scaled_weight(phi, 2.0)).value;
  CHECK(e2 == doctest::Approx(4.0 * e1).epsilon(1e-4));

  auto other = fubini_study_weight(1, 2.0);
  CHECK_THROWS_AS(energy_legendre(psi, other), std::invalid_argument);
}

TEST_CASE("ma route auto-projects and reports masses") {
  auto psi = fubini_study_weight(1);
  auto phi = perturbed_weight(psi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.2);
  auto e = energy_ma_1d(psi, phi);
  CHECK(e.auto_projected);
  CHECK(e.mass_psi == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(e.mass_phi == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("order reversal of the conjugate") {
  auto psi = fubini_study_weight(1);
  auto phi = perturbed_weight(psi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0), 0.2);
  for (double p = 0.05; p < 1.0; p += 0.05)
    CHECK(legendre(psi, {p, 0}) >= legendre(phi, {p, 0}) - 1e-12);
}

TEST_CASE("derivative check: constant, zero and bump directions") {
  auto psi = fubini_study_weight(1);
  auto phi = shifted_weight(psi, 0.3);
  auto rep1 = derivative_check_1d(psi, phi, constant_term(1, 1.0));
  CHECK(rep1.fd_value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(rep1.formula_value == doctest::Approx(1.0).epsilon(1e-6));

  auto rep0 = derivative_check_1d(psi, phi, constant_term(1, 0.0));
  CHECK(rep0.fd_value == doctest::Approx(0.0));
  CHECK(rep0.formula_value == doctest::Approx(0.0));

  auto repb = derivative_check_1d(psi, phi, quadratic_bump_term(1, {0, 0}, 1.0, 1.0));
  CHECK(std::fabs(repb.difference) <= 1e-3);
}

TEST_CASE("zero fiber: Fubini-Study on P^2 and a product weight") {
  auto fs2 = fubini_study_weight(2);
  for (double a : {0.25, 0.5, 0.75}) {
    auto z = zero_fiber_restriction(fs2, a);
    CHECK(z.converged);
    CHECK(z.c_full == doctest::Approx(entropy(a)).epsilon(0.02));
    CHECK(z.c_restricted == doctest::Approx(entropy(a)).epsilon(0.02));
    CHECK(std::fabs(z.difference) <= 0.05);
  }
  // Symmetry of the restricted weight about the edge midpoint.
  auto za = zero_fiber_restriction(fs2, 0.4);
  auto zb = zero_fiber_restriction(fs2, 0.6);
  CHECK(za.c_full == doctest::Approx(zb.c_full).epsilon(1e-6));

  // Product weight on the unit box: both routes give 2 g1*(0) + 2 g2*(alpha).
  auto gx = softmax_affine_term(2, {{{0, 0}, 0.0}, {{1, 0}, 0.0}}, 2.0);
  auto gy = softmax_affine_term(2, {{{0, 0}, 0.0}, {{0, 1}, 0.0}}, 2.0);
  ToricWeight box;
  box.n = 2;
  box.polytope = ConvexBody::box2(0, 1, 0, 1);
  box.g = sum_term({gx, gy}, {});
  box.convex_hint = true;
  box.growth_bound = 2.0;
  box.name = "fs_box";
  for (double a : {0.3, 0.5}) {
    auto z = zero_fiber_restriction(box, a);
    CHECK(std::fabs(z.difference) <= 0.05);
    CHECK(z.c_full == doctest::Approx(entropy(a)).epsilon(0.02));
  }
  CHECK_THROWS_AS(zero_fiber_restriction(fs2, 1.5), std::invalid_argument);
}

TEST_CASE("legendre involution on the sampled box") {
  auto fs = fubini_study_weight(1);
  int grid = 801;
  std::vector<std::pair<std::array<double, 2>, double>> pieces;
  for (int i = 0; i < grid; ++i) {
    double p = 1e-3 + (1.0 - 2e-3) * i / (grid - 1);
    pieces.push_back({{p, 0}, -legendre(fs, {p, 0})});
  }
  auto conj2 = max_affine_term(1, std::move(pieces));
  for (double x = -3.0; x <= 3.0; x += 0.25)
    CHECK(conj2->eval({x, 0}) == doctest::Approx(fs.eval1(x)).epsilon(1e-4));
}

TEST_CASE("weight JSON schema") {
  auto fs = weight_from_json(
      R"({"n":1,"polytope":[[0],[1]],"g":{"kind":"fubini_study","scale":1},"convex":true})");
  auto ref = fubini_study_weight(1);
  for (double x = -4; x <= 4; x += 0.5)
    CHECK(fs.eval1(x) == doctest::Approx(ref.eval1(x)));

  auto ma = weight_from_json(
      R"({"n":1,"polytope":[[0],[1]],"g":{"kind":"max_affine","pieces":[[0,0],[1,0]]}})");
  CHECK(ma.eval1(2.0) == doctest::Approx(2.0));

  auto sum = weight_from_json(
      R"({"n":1,"polytope":[[0],[1]],"g":{"kind":"sum","terms":[
          {"kind":"fubini_study","scale":1},
          {"kind":"quadratic_bump","center":[0],"width":1,"height":1}],
          "coeffs":[1.0,0.1]}})");
  CHECK(sum.eval1(0.0) == doctest::Approx(ref.eval1(0.0) + 0.1));

  CHECK_THROWS_AS(weight_from_json(R"({"n":1,"polytope":[[0],[1]]})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      weight_from_json(R"({"n":1,"polytope":[[0],[1]],"g":{"kind":"nope"}})"),
      std::invalid_argument);
}
