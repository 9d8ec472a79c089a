#include "okb/gridfn.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace okb {

ChebyshevField ChebyshevField::over_interior(const ConvexBody& body,
                                             int cells_per_axis, int margin_cells) {
  if (body.n > 2)
    throw std::invalid_argument("ChebyshevField: grids are supported for n <= 2");
  if (cells_per_axis < 1 ||
      (margin_cells > 0 && cells_per_axis < 2 * margin_cells + 2))
    throw std::invalid_argument("ChebyshevField: grid too coarse for the margin");
  ChebyshevField f;
  f.body = body;
  std::array<double, 3> lo{}, hi{};
  body.bounding_box(lo, hi);
  f.grid.n = body.n;
  f.grid.margin_cells = margin_cells;
  double extent = hi[0] - lo[0];
  if (body.n == 2) extent = std::max(extent, hi[1] - lo[1]);
  f.grid.h = extent / cells_per_axis;
  f.grid.origin = {lo[0], lo[1]};
  f.grid.counts[0] = int(std::floor((hi[0] - lo[0]) / f.grid.h + 0.5)) + 1;
  f.grid.counts[1] =
      (body.n == 2) ? int(std::floor((hi[1] - lo[1]) / f.grid.h + 0.5)) + 1 : 1;
  f.values.assign(f.node_count(), std::numeric_limits<double>::quiet_NaN());
  f.state.assign(f.node_count(), NodeState::kOutside);
  double min_dist = margin_cells * f.grid.h - 1e-12 * std::max(1.0, extent);
  for (int j = 0; j < std::max(1, f.grid.counts[1]); ++j)
    for (int i = 0; i < f.grid.counts[0]; ++i) {
      auto p = f.node_coord(i, j);
      std::array<double, 3> x{p[0], p[1], 0};
      if (body.contains(x, 1e-12) && body.distance_to_boundary(x) >= min_dist)
        f.state[f.index(i, j)] = NodeState::kMissing;
    }
  return f;
}

bool ChebyshevField::nearest_node(const std::array<double, 2>& p, int& i,
                                  int& j) const {
  i = int(std::lround((p[0] - grid.origin[0]) / grid.h));
  j = (grid.n == 2) ? int(std::lround((p[1] - grid.origin[1]) / grid.h)) : 0;
  if (i < 0 || i >= grid.counts[0]) return false;
  if (grid.n == 2 && (j < 0 || j >= grid.counts[1])) return false;
  return state[index(i, j)] == NodeState::kPresent;
}

void ChebyshevField::convexify(double tol, long max_sweeps) {
  const int nx = grid.counts[0];
  const int ny = std::max(1, grid.counts[1]);
  // Direction set: 1D uses strides, 2D uses primitive lattice directions of
  // bounded height plus axis strides.
  std::vector<std::array<int, 2>> dirs;
  if (grid.n == 1) {
    for (int d = 1; d <= nx / 2; ++d) dirs.push_back({d, 0});
  } else {
    for (int dx = 0; dx <= 4; ++dx)
      for (int dy = -4; dy <= 4; ++dy) {
        if (dx == 0 && dy <= 0) continue;
        if (std::gcd(dx, std::abs(dy)) != 1) continue;
        for (int s = 1; s <= std::max(nx, ny) / 2; ++s) {
          if (std::abs(dx * s) >= nx || std::abs(dy * s) >= ny) break;
          dirs.push_back({dx * s, dy * s});
        }
      }
  }
  for (long sweep = 0; sweep < max_sweeps; ++sweep) {
    double max_change = 0.0;
    for (const auto& d : dirs)
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          int i0 = i - d[0], j0 = j - d[1];
          int i1 = i + d[0], j1 = j + d[1];
          if (i0 < 0 || i1 >= nx || j0 < 0 || j0 >= ny || j1 < 0 || j1 >= ny)
            continue;
          if (state[index(i, j)] != NodeState::kPresent ||
              state[index(i0, j0)] != NodeState::kPresent ||
              state[index(i1, j1)] != NodeState::kPresent)
            continue;
          double mid = 0.5 * (values[index(i0, j0)] + values[index(i1, j1)]);
          double& v = values[index(i, j)];
          if (v > mid) {
            max_change = std::max(max_change, v - mid);
            v = mid;
          }
        }
    if (max_change <= tol) break;
  }
  convexified = true;
}

ConvexityAudit ChebyshevField::audit_convexity(double tol) const {
  ConvexityAudit out;
  const int nx = grid.counts[0];
  const int ny = std::max(1, grid.counts[1]);
  for (int dy = (grid.n == 1 ? 0 : -(ny - 1) / 2); dy <= (grid.n == 1 ? 0 : (ny - 1) / 2);
       ++dy)
    for (int dx = 0; dx <= (nx - 1) / 2; ++dx) {
      if (dx == 0 && dy <= 0) continue;
      for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
          int i0 = i - dx, j0 = j - dy, i1 = i + dx, j1 = j + dy;
          if (i0 < 0 || i1 >= nx || j0 < 0 || j0 >= ny || j1 < 0 || j1 >= ny)
            continue;
          if (state[index(i, j)] != NodeState::kPresent ||
              state[index(i0, j0)] != NodeState::kPresent ||
              state[index(i1, j1)] != NodeState::kPresent)
            continue;
          double mid = 0.5 * (values[index(i0, j0)] + values[index(i1, j1)]);
          double viol = values[index(i, j)] - mid;
          if (viol > out.worst_violation) {
            out.worst_violation = viol;
            out.node = {i, j};
            out.direction = {dx, dy};
          }
        }
    }
  out.pass = out.worst_violation <= tol;
  return out;
}

std::string ChebyshevField::to_csv() const {
  std::string out = (grid.n == 1) ? "alpha,value,missing\n"
                                  : "alpha1,alpha2,value,missing\n";
  char buf[128];
  const int ny = std::max(1, grid.counts[1]);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < grid.counts[0]; ++i) {
      auto p = node_coord(i, j);
      auto s = state[index(i, j)];
      if (s == NodeState::kOutside) continue;
      double v = values[index(i, j)];
      if (grid.n == 1)
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%d\n", p[0],
                      s == NodeState::kPresent ? v : 0.0, int(s));
      else
        std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%d\n", p[0], p[1],
                      s == NodeState::kPresent ? v : 0.0, int(s));
      out += buf;
    }
  return out;
}

}  // namespace okb
