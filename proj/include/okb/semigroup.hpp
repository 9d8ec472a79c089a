#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "okb/convex_body.hpp"

namespace okb {

// A point (alpha, k) of a graded subsemigroup of N^{d+1}: alpha in N^d,
// level k >= 1.
struct GradedPoint {
  std::array<std::int64_t, 3> alpha{0, 0, 0};
  std::int64_t level = 1;
};

struct GroupCheck {
  bool full = false;
  int rank = 0;
  std::vector<std::int64_t> pivots;
  std::string message;  // names the failing quotient when not full
};

struct BodyResult {
  ConvexBody body;
  bool monotone_certified = false;  // hull(k) inside hull(k_max) for all k
  double max_violation = 0.0;
};

struct ProbeViolation {
  std::array<std::int64_t, 3> point{0, 0, 0};
  std::int64_t level = 0;
  double scaled_distance = 0.0;  // k * dist(alpha/k, boundary)
};

struct ProbeResult {
  double c_min = 0.0;          // smallest C that works on the tested range
  bool within_cap = true;
  std::vector<ProbeViolation> violations;  // points needing C > cap
};

struct CountCheck {
  std::int64_t level = 0;
  std::size_t slice_size = 0;
  std::int64_t expected = 0;
  bool ok = false;
};

// Graded semigroup given by generators, with level slices cached by
// dynamic programming over levels. Immutable after enumeration.
class GradedSemigroup {
 public:
  GradedSemigroup(int d, std::vector<GradedPoint> generators);

  int dim() const { return d_; }
  const std::vector<GradedPoint>& generators() const { return generators_; }
  std::int64_t horizon() const { return horizon_; }

  // Fills cached level slices up to k_max. Coordinates above the 2^31
  // per-axis cap are rejected with an explicit message.
  void enumerate_levels(std::int64_t k_max);

  // Sorted slice k*Delta_k (integer alpha vectors at level k).
  const std::vector<std::array<std::int64_t, 3>>& slice(std::int64_t k) const;
  bool contains(const std::array<std::int64_t, 3>& alpha, std::int64_t k) const;

  // Convex hull of union over k <= k_max of (1/k) * slice(k), with a
  // monotonicity certificate against the smaller horizons.
  BodyResult okounkov_body(std::int64_t k_max) const;

  // Exact body of the semigroup: hull of generator ratio points
  // (the cone spanned by Gamma is the cone spanned by its generators).
  ConvexBody generator_body() const;

  // Smallest C such that every (1/k)-lattice point of the body at
  // distance > C/k from the boundary lies in Delta_k, over k in
  // [k_lo, k_hi]. Precondition: generators span Z^{d+1} as a group.
  ProbeResult khovanskii_threshold_probe(std::int64_t k_lo, std::int64_t k_hi,
                                         double c_cap) const;

  GroupCheck group_check() const;

  CountCheck lattice_point_count_check(std::int64_t k, std::int64_t expected) const;

  // The semigroup of mL: keep points at levels divisible by m, divide the
  // level by m. Requires levels cached to m * new horizon.
  GradedSemigroup multiple_subsemigroup(std::int64_t m) const;

  // One-sided Hausdorff distance from the body to the union of slices up
  // to each K in ks (empirical probe for the density of the slices).
  std::vector<double> fill_distance_report(const std::vector<std::int64_t>& ks) const;

 private:
  int d_;
  std::vector<GradedPoint> generators_;
  std::vector<std::vector<std::array<std::int64_t, 3>>> levels_;  // [k]
  std::int64_t horizon_ = 0;
};

// Toric-style semigroup: generators are the level-1 lattice points of the
// polytope.
GradedSemigroup toric_semigroup(const ConvexBody& polytope);

// O(1) on P^1: generators {(0,1),(1,1)}.
GradedSemigroup p1_semigroup();

// O(1) on P^n (n=2,3): level-1 unit simplex lattice points.
GradedSemigroup pn_semigroup(int n);

// JSON document {"d": n, "generators": [[a1,...,an,k], ...]}.
GradedSemigroup semigroup_from_json(const std::string& text);
std::string semigroup_to_json(const GradedSemigroup& sg);

}  // namespace okb
