#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "okb/convex_body.hpp"

namespace okb {

// Node states: value present / in-domain but no data / outside the
// margin-shrunk interior.
enum class NodeState : std::uint8_t { kPresent = 0, kMissing = 1, kOutside = 2 };

struct GridSpec {
  int n = 1;
  std::array<double, 2> origin{0, 0};
  double h = 0.0;
  std::array<int, 2> counts{0, 0};
  int margin_cells = 2;
};

struct ConvexityAudit {
  bool pass = true;
  double worst_violation = 0.0;
  std::array<int, 2> node{-1, -1};
  std::array<int, 2> direction{0, 0};
};

// Scalar field on a regular grid over a body's interior. Used for
// Chebyshev transforms, envelopes and their audits.
struct ChebyshevField {
  ConvexBody body;
  GridSpec grid;
  std::vector<double> values;
  std::vector<NodeState> state;
  bool convexified = false;

  // Grid with cells_per_axis cells across the bounding box; nodes closer
  // than margin_cells*h to the boundary are marked outside.
  static ChebyshevField over_interior(const ConvexBody& body, int cells_per_axis,
                                      int margin_cells = 2);

  std::size_t index(int i, int j = 0) const {
    return std::size_t(j) * grid.counts[0] + i;
  }
  std::array<double, 2> node_coord(int i, int j = 0) const {
    return {grid.origin[0] + i * grid.h, grid.origin[1] + j * grid.h};
  }
  std::size_t node_count() const {
    return std::size_t(grid.counts[0]) * std::max(1, grid.counts[1]);
  }
  // Nearest present node to p; returns false if none within one cell.
  bool nearest_node(const std::array<double, 2>& p, int& i, int& j) const;
  double value_at(int i, int j = 0) const { return values[index(i, j)]; }

  // Iterated midpoint relaxation across all collinear grid triples until
  // the sweep changes nothing beyond tol. Sets the convexified flag.
  void convexify(double tol = 1e-10, long max_sweeps = 200000);

  // Midpoint convexity on all collinear grid triples with present nodes.
  ConvexityAudit audit_convexity(double tol = 1e-8) const;

  std::string to_csv() const;
};

}  // namespace okb
