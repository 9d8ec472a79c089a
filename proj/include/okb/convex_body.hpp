#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace okb {

// Exact rational point for low-dimensional hulls: num/den per coordinate,
// shared positive denominator.
struct RationalPoint {
  std::array<std::int64_t, 3> num{0, 0, 0};
  std::int64_t den = 1;
};

// Compact convex set in R^n, n <= 3, as hull vertices plus facet
// inequalities normal.x <= offset.
struct ConvexBody {
  struct Facet {
    std::array<double, 3> normal{0, 0, 0};
    double offset = 0.0;
  };

  int n = 1;
  std::vector<std::array<double, 3>> vertices;
  std::vector<Facet> facets;
  bool degenerate = false;

  static ConvexBody interval(double a, double b);
  static ConvexBody box2(double ax, double bx, double ay, double by);
  static ConvexBody simplex2(double d);
  // Hull of arbitrary points (floating; robust orientation with tolerance
  // for n=3, exact predicates are used on the rational path below).
  static ConvexBody from_points(int n, const std::vector<std::array<double, 3>>& pts);
  // Hull of exact rational points, n <= 2. Predicates in 128-bit integers.
  static ConvexBody from_rational_points(int n, const std::vector<RationalPoint>& pts);

  bool contains(const std::array<double, 3>& x, double tol = 1e-12) const;
  // Distance from an interior point to the boundary (min over facets).
  double distance_to_boundary(const std::array<double, 3>& x) const;
  double volume() const;
  // Support function h(u) = max over vertices of <u,v>.
  double support(const std::array<double, 3>& u) const;
  ConvexBody scaled(double m) const;
  // Mutual containment of vertex sets within tol.
  bool approx_equal(const ConvexBody& other, double tol = 1e-9) const;
  // Integer points m with m/k in the body (closed, tolerance 1e-9/k).
  std::vector<std::array<std::int64_t, 3>> lattice_points(std::int64_t k) const;

  std::array<double, 3> centroid() const;
  void bounding_box(std::array<double, 3>& lo, std::array<double, 3>& hi) const;
};

}  // namespace okb
