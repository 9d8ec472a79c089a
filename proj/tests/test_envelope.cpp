#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "okb/envelope.hpp"
#include "okb/util.hpp"

using namespace okb;

namespace {

double entropy(double a) {
  if (a <= 0.0 || a >= 1.0) return 0.0;
  return a * std::log(a) + (1.0 - a) * std::log(1.0 - a);
}

}  // namespace

TEST_CASE("already convex homogeneous table reproduces f with grid accuracy") {
  auto sg = p1_semigroup();
  SubadditiveTable table(sg, 200,
                         [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
                           double x = double(a[0]) / double(k);
                           return double(k) * x * x;
                         });
  auto field = envelope_estimate(table, 200, 100, 2);
  double worst = 0.0;
  for (int i = 0; i < field.grid.counts[0]; ++i) {
    if (field.state[field.index(i)] != NodeState::kPresent) continue;
    double p = field.node_coord(i)[0];
    worst = std::max(worst, std::fabs(field.value_at(i) - p * p));
  }
  CHECK(worst <= 1e-4);  // grid^2 at h = 0.01
}

TEST_CASE("zero table gives the zero field") {
  SubadditiveTable table(p1_semigroup(), 40,
                         [](const std::array<std::int64_t, 3>&, std::int64_t) {
                           return 0.0;
                         });
  auto field = envelope_estimate(table, 40, 40, 2);
  for (std::size_t i = 0; i < field.node_count(); ++i)
    if (field.state[i] == NodeState::kPresent)
      CHECK(field.values[i] == doctest::Approx(0.0));
}

TEST_CASE("binomial table: envelope approaches the entropy (Stirling oracle)") {
  auto table = binomial_table(200);
  auto field = envelope_estimate(table, 200, 100, 2);
  double worst = 0.0;
  for (int i = 0; i < field.grid.counts[0]; ++i) {
    if (field.state[field.index(i)] != NodeState::kPresent) continue;
    double p = field.node_coord(i)[0];
    worst = std::max(worst, std::fabs(field.value_at(i) - entropy(p)));
  }
  CHECK(worst <= 0.02);
  CHECK(field.convexified);
  CHECK(field.audit_convexity(1e-8).pass);
}

TEST_CASE("envelope output stays below the raw table values") {
  auto table = binomial_table(100);
  auto field = envelope_estimate(table, 100, 100, 2);
  for (int i = 0; i < field.grid.counts[0]; ++i) {
    if (field.state[field.index(i)] != NodeState::kPresent) continue;
    double p = field.node_coord(i)[0];
    std::int64_t j = std::llround(p * 100);
    CHECK(field.value_at(i) <= -ln_binomial(100, j) / 100.0 + 1e-12);
  }
}

TEST_CASE("approximating subsequences agree in the limit (even vs odd levels)") {
  auto table = binomial_table(201);
  auto diff_at = [&](std::int64_t k) {
    // alpha = 1/2 through even level 2k and the nearest odd-level point.
    double even = table.value({k, 0, 0}, 2 * k) / double(2 * k);
    std::int64_t ko = 2 * k + 1;
    double odd = table.value({(ko + 1) / 2, 0, 0}, ko) / double(ko);
    return std::fabs(even - odd);
  };
  CHECK(diff_at(100) < diff_at(25));
  CHECK(diff_at(100) <= 0.02);
}

TEST_CASE("ray monotonicity: binomial ray at 1/2 decreases to -ln 2") {
  auto table = binomial_table(200);
  auto ray = ray_monotonicity_report(table, {1, 0, 0}, 2, 100);
  CHECK(ray.nonincreasing);
  CHECK(ray.worst_increase <= 1e-9);
  CHECK(ray.limit_estimate == doctest::Approx(-std::log(2.0)).epsilon(5e-3));
}

TEST_CASE("ray monotonicity: linear table is constant, noisy table converges") {
  SubadditiveTable linear(p1_semigroup(), 60,
                          [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
                            return 2.0 * double(a[0]) + 3.0 * double(k);
                          });
  auto ray = ray_monotonicity_report(linear, {1, 0, 0}, 2, 30);
  CHECK(ray.worst_increase <= 1e-12);
  for (double v : ray.sequence) CHECK(v == doctest::Approx(ray.sequence[0]));

  SubadditiveTable noisy(p1_semigroup(), 120,
                         [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
                           return double(a[0]) + 1.0 / double(k);
                         });
  auto ray2 = ray_monotonicity_report(noisy, {1, 0, 0}, 2, 60);
  CHECK(ray2.nonincreasing);
  CHECK(ray2.limit_estimate == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("linear field passes the audit with zero violation") {
  SubadditiveTable linear(p1_semigroup(), 80,
                          [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
                            return 2.0 * double(a[0]) + 3.0 * double(k);
                          });
  auto field = envelope_estimate(linear, 80, 80, 2);
  auto audit = field.audit_convexity(1e-8);
  CHECK(audit.pass);
  CHECK(audit.worst_violation <= 1e-12);
}

TEST_CASE("convexity audit localizes a corrupted node") {
  auto table = binomial_table(60);
  auto field = envelope_estimate(table, 60, 60, 2);
  CHECK(field.audit_convexity(1e-8).pass);
  int mid = field.grid.counts[0] / 2;
  field.values[field.index(mid)] += 0.5;
  auto audit = field.audit_convexity(1e-8);
  CHECK_FALSE(audit.pass);
  CHECK(audit.node[0] == mid);
  CHECK(audit.worst_violation > 0.4);
}

TEST_CASE("homogeneity: the mL table reproduces the scaled envelope") {
  auto table = binomial_table(120);
  auto field = envelope_estimate(table, 120, 60, 2);
  auto base = p1_semigroup();
  base.enumerate_levels(120);
  auto sub = base.multiple_subsemigroup(2);
  SubadditiveTable table2(sub, 60,
                          [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
                            return -ln_binomial(2 * k, a[0]);
                          });
  auto field2 = envelope_estimate(table2, 60, 60, 2);
  for (double q : {0.3, 0.5, 0.7}) {
    int i1, j1, i2, j2;
    REQUIRE(field.nearest_node({q, 0}, i1, j1));
    REQUIRE(field2.nearest_node({2.0 * q, 0}, i2, j2));
    CHECK(field2.value_at(i2, j2) ==
          doctest::Approx(2.0 * field.value_at(i1, j1)).epsilon(0.02));
  }
}

TEST_CASE("subadditivity audit and the linear lower bound") {
  auto table = binomial_table(30);
  auto audit = table.audit_subadditivity(200000, 1e-9);
  CHECK(audit.pass);
  CHECK(audit.pairs_checked > 1000);
  // F(j,k) >= -k ln2 >= -(k + k|alpha|) ln 2, so the fitted constant is
  // finite and at least -ln 2.
  CHECK(table.fitted_lower_bound_constant() >= -std::log(2.0) - 1e-12);
}

TEST_CASE("missing nodes are reported, never interpolated") {
  GradedSemigroup sparse(1, {GradedPoint{{0, 0, 0}, 1}, GradedPoint{{5, 0, 0}, 1}});
  SubadditiveTable table(sparse, 3,
                         [](const std::array<std::int64_t, 3>&, std::int64_t) {
                           return 1.0;
                         });
  auto field = envelope_estimate(table, 3, 50, 2);
  bool any_missing = false;
  for (std::size_t i = 0; i < field.node_count(); ++i) {
    if (field.state[i] == NodeState::kMissing) {
      any_missing = true;
      CHECK(std::isnan(field.values[i]));
    }
  }
  CHECK(any_missing);
}
