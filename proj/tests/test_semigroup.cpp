#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "okb/semigroup.hpp"
#include "okb/util.hpp"

using namespace okb;

namespace {

// Independent enumeration oracle: all sums of generator multisets whose
// levels total k (1D alpha).
std::set<std::int64_t> brute_slice_1d(
    const std::vector<std::pair<std::int64_t, std::int64_t>>& gens,
    std::int64_t k) {
  std::set<std::pair<std::int64_t, std::int64_t>> states{{0, 0}};  // (level, sum)
  for (std::int64_t step = 0; step < k; ++step) {
    std::set<std::pair<std::int64_t, std::int64_t>> next = states;
    for (const auto& [lvl, sum] : states)
      for (const auto& [a, gl] : gens)
        if (lvl + gl <= k) next.insert({lvl + gl, sum + a});
    states = next;
  }
  std::set<std::int64_t> out;
  for (const auto& [lvl, sum] : states)
    if (lvl == k) out.insert(sum);
  return out;
}

GradedSemigroup make_1d(const std::vector<std::pair<std::int64_t, std::int64_t>>& gens) {
  std::vector<GradedPoint> g;
  for (auto [a, k] : gens) g.push_back(GradedPoint{{a, 0, 0}, k});
  return GradedSemigroup(1, g);
}

}  // namespace

TEST_CASE("level enumeration matches the stated examples and the brute oracle") {
  auto sg = p1_semigroup();
  sg.enumerate_levels(3);
  std::vector<std::array<std::int64_t, 3>> expect{{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}};
  CHECK(sg.slice(3) == expect);

  auto sparse = make_1d({{0, 1}, {2, 1}, {3, 1}});
  sparse.enumerate_levels(8);
  std::vector<std::int64_t> got;
  for (const auto& a : sparse.slice(2)) got.push_back(a[0]);
  CHECK(got == std::vector<std::int64_t>{0, 2, 3, 4, 5, 6});
  for (std::int64_t k = 1; k <= 8; ++k) {
    auto oracle = brute_slice_1d({{0, 1}, {2, 1}, {3, 1}}, k);
    std::set<std::int64_t> mine;
    for (const auto& a : sparse.slice(k)) mine.insert(a[0]);
    CHECK(mine == oracle);
  }
}

TEST_CASE("level-1 slice of a translated unit simplex is the generator set") {
  std::vector<GradedPoint> gens;
  for (auto a : std::vector<std::array<std::int64_t, 3>>{
           {1, 1, 1}, {2, 1, 1}, {1, 2, 1}, {1, 1, 2}})
    gens.push_back(GradedPoint{a, 1});
  GradedSemigroup sg(3, gens);
  sg.enumerate_levels(2);
  CHECK(sg.slice(1).size() == 4);
  for (const auto& g : gens) CHECK(sg.contains(g.alpha, 1));
}

TEST_CASE("okounkov bodies of the named semigroups") {
  auto sg = p1_semigroup();
  sg.enumerate_levels(6);
  auto body = sg.okounkov_body(6);
  CHECK(body.body.n == 1);
  CHECK(body.body.vertices.front()[0] == doctest::Approx(0.0));
  CHECK(body.body.vertices.back()[0] == doctest::Approx(1.0));
  CHECK(body.body.volume() == doctest::Approx(1.0));
  CHECK(body.monotone_certified);

  auto box = toric_semigroup(ConvexBody::box2(0, 1, 0, 1));
  box.enumerate_levels(4);
  auto bb = box.okounkov_body(4);
  CHECK(bb.body.volume() == doctest::Approx(1.0));
  CHECK(bb.body.approx_equal(ConvexBody::box2(0, 1, 0, 1), 1e-12));

  GradedSemigroup point(1, {GradedPoint{{1, 0, 0}, 1}});
  point.enumerate_levels(3);
  auto pb = point.okounkov_body(3);
  CHECK(pb.body.degenerate);
  CHECK(pb.body.volume() == doctest::Approx(0.0));
}

TEST_CASE("volume formulas: interval, simplex, dilated simplex") {
  CHECK(ConvexBody::interval(0, 1).volume() == doctest::Approx(1.0));
  CHECK(ConvexBody::simplex2(1).volume() == doctest::Approx(0.5));
  // O(d) on P^2 has the dilated simplex as its body; shoelace gives d^2/2.
  for (double d : {2.0, 3.0}) {
    auto sg = toric_semigroup(ConvexBody::simplex2(d));
    sg.enumerate_levels(3);
    CHECK(sg.okounkov_body(3).body.volume() == doctest::Approx(d * d / 2));
  }
}

TEST_CASE("3d body: unit simplex volume") {
  auto sg = pn_semigroup(3);
  sg.enumerate_levels(2);
  auto body = sg.okounkov_body(2);
  CHECK(body.body.volume() == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
}

TEST_CASE("3d body: unit cube from its corner generators") {
  std::vector<GradedPoint> gens;
  for (std::int64_t a = 0; a <= 1; ++a)
    for (std::int64_t b = 0; b <= 1; ++b)
      for (std::int64_t c = 0; c <= 1; ++c)
        gens.push_back(GradedPoint{{a, b, c}, 1});
  GradedSemigroup sg(3, gens);
  sg.enumerate_levels(2);
  auto body = sg.okounkov_body(2);
  CHECK(body.body.volume() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(body.body.vertices.size() == 8);
  CHECK(body.monotone_certified);
}

TEST_CASE("khovanskii threshold probe") {
  auto p1 = p1_semigroup();
  p1.enumerate_levels(30);
  auto probe = p1.khovanskii_threshold_probe(1, 30, 16.0);
  CHECK(probe.c_min == doctest::Approx(0.0));

  auto sparse = make_1d({{0, 1}, {2, 1}, {3, 1}});
  sparse.enumerate_levels(50);
  auto probe2 = sparse.khovanskii_threshold_probe(2, 50, 16.0);
  CHECK(probe2.c_min == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(probe2.within_cap);

  // Hole pattern: gaps of the numerical semigroup <3,5> stay missing, so
  // the probe must report the finite threshold the enumeration oracle gives.
  auto holes = make_1d({{0, 1}, {3, 1}, {5, 1}});
  holes.enumerate_levels(40);
  auto probe3 = holes.khovanskii_threshold_probe(2, 40, 16.0);
  CHECK(probe3.within_cap);
  double oracle = 0.0;
  for (std::int64_t k = 2; k <= 40; ++k) {
    auto sl = brute_slice_1d({{0, 1}, {3, 1}, {5, 1}}, k);
    for (std::int64_t m = 0; m <= 5 * k; ++m)
      if (!sl.count(m)) {
        double dist = std::min(double(m) / k, 5.0 - double(m) / k);
        if (dist > 0) oracle = std::max(oracle, dist * k);
      }
  }
  CHECK(probe3.c_min == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("group generation precondition names the failing quotient") {
  auto even = make_1d({{0, 1}, {2, 1}});
  even.enumerate_levels(4);
  auto gc = even.group_check();
  CHECK_FALSE(gc.full);
  CHECK(gc.message.find("Z/2") != std::string::npos);
  CHECK_THROWS_AS(even.khovanskii_threshold_probe(1, 4, 8.0), std::invalid_argument);
}

TEST_CASE("lattice point counts match section space dimensions") {
  auto p1 = p1_semigroup();
  p1.enumerate_levels(7);
  CHECK(p1.lattice_point_count_check(7, 8).ok);

  auto p2 = pn_semigroup(2);
  p2.enumerate_levels(5);
  CHECK(p2.lattice_point_count_check(5, (5 + 1) * (5 + 2) / 2).ok);

  auto box = toric_semigroup(ConvexBody::box2(0, 1, 0, 1));
  box.enumerate_levels(2);
  CHECK(box.lattice_point_count_check(2, 9).ok);
}

TEST_CASE("level additivity holds on cached slices") {
  auto sg = make_1d({{0, 1}, {2, 1}, {3, 2}});
  sg.enumerate_levels(12);
  for (std::int64_t k1 : {2, 3, 5})
    for (std::int64_t k2 : {2, 4, 7}) {
      for (const auto& a : sg.slice(k1))
        for (const auto& b : sg.slice(k2)) {
          std::array<std::int64_t, 3> sum{a[0] + b[0], 0, 0};
          CHECK(sg.contains(sum, k1 + k2));
        }
    }
}

TEST_CASE("scaling: the semigroup of mL has the m-scaled body") {
  auto p1 = p1_semigroup();
  p1.enumerate_levels(12);
  auto base_body = p1.okounkov_body(12).body;
  for (std::int64_t m : {2, 3}) {
    auto sub = p1.multiple_subsemigroup(m);
    sub.enumerate_levels(12 / m);
    auto body = sub.okounkov_body(12 / m).body;
    CHECK(body.approx_equal(base_body.scaled(double(m)), 1e-12));
  }
}

TEST_CASE("slice closure fills the body (fill distances decrease)") {
  auto sparse = make_1d({{0, 1}, {2, 1}, {3, 1}});
  sparse.enumerate_levels(16);
  auto dists = sparse.fill_distance_report({2, 4, 8, 16});
  for (std::size_t i = 1; i < dists.size(); ++i) CHECK(dists[i] <= dists[i - 1] + 1e-12);
  // c/K decay: K * d_K stays bounded by a small constant for this pattern.
  std::vector<std::int64_t> ks{2, 4, 8, 16};
  for (std::size_t i = 0; i < dists.size(); ++i) CHECK(double(ks[i]) * dists[i] <= 4.0);
}

TEST_CASE("coordinate cap overflow is rejected with a clear error") {
  CHECK_THROWS_WITH_AS(
      GradedSemigroup(1, {GradedPoint{{(std::int64_t(1) << 31) + 1, 0, 0}, 1}}),
      doctest::Contains("cap"), std::invalid_argument);
  GradedSemigroup big(1, {GradedPoint{{(std::int64_t(1) << 31), 0, 0}, 1}});
  CHECK_THROWS_AS(big.enumerate_levels(2), std::runtime_error);
}

TEST_CASE("semigroup JSON round trip") {
  auto sg = semigroup_from_json(R"({"d":1,"generators":[[0,1],[2,1],[3,1]]})");
  CHECK(sg.dim() == 1);
  CHECK(sg.generators().size() == 3);
  auto text = semigroup_to_json(sg);
  auto sg2 = semigroup_from_json(text);
  CHECK(sg2.generators().size() == 3);
  CHECK_THROWS_AS(semigroup_from_json(R"({"d":1})"), std::invalid_argument);
  CHECK_THROWS_AS(semigroup_from_json(R"({"d":1,"generators":[[0]]})"),
                  std::invalid_argument);
}

TEST_CASE("empty and invalid semigroups are rejected") {
  CHECK_THROWS_AS(GradedSemigroup(1, {}), std::invalid_argument);
  CHECK_THROWS_AS(GradedSemigroup(1, {GradedPoint{{-1, 0, 0}, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(GradedSemigroup(1, {GradedPoint{{1, 0, 0}, 0}}),
                  std::invalid_argument);
}
