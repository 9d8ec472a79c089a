#include "okb/convex_body.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace okb {

namespace {

using I128 = __int128;

// Orientation of the triangle (a,b,c) for exact rational 2D points:
// sign of cross((b-a),(c-a)). Denominators are positive, so the sign of
// the cross product of numerator differences scaled by denominators is
// exact in 128-bit arithmetic at the coordinate caps used here.
int orient2_exact(const RationalPoint& a, const RationalPoint& b,
                  const RationalPoint& c) {
  // (b-a) = (b.num*a.den - a.num*b.den) / (a.den*b.den), similarly (c-a).
  I128 ux = I128(b.num[0]) * a.den - I128(a.num[0]) * b.den;
  I128 uy = I128(b.num[1]) * a.den - I128(a.num[1]) * b.den;
  I128 vx = I128(c.num[0]) * a.den - I128(a.num[0]) * c.den;
  I128 vy = I128(c.num[1]) * a.den - I128(a.num[1]) * c.den;
  // Common positive factors a.den*b.den and a.den*c.den do not change the
  // sign; cross = ux*vy - uy*vx.
  I128 cr = ux * vy - uy * vx;
  return (cr > 0) - (cr < 0);
}

bool rational_less(const RationalPoint& a, const RationalPoint& b) {
  for (int i = 0; i < 2; ++i) {
    I128 lhs = I128(a.num[i]) * b.den;
    I128 rhs = I128(b.num[i]) * a.den;
    if (lhs != rhs) return lhs < rhs;
  }
  return false;
}

bool rational_eq(const RationalPoint& a, const RationalPoint& b) {
  return !rational_less(a, b) && !rational_less(b, a);
}

double rp_coord(const RationalPoint& p, int i) {
  return double(p.num[i]) / double(p.den);
}

double dot3(const std::array<double, 3>& a, const std::array<double, 3>& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

std::array<double, 3> sub3(const std::array<double, 3>& a,
                           const std::array<double, 3>& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

std::array<double, 3> cross3(const std::array<double, 3>& a,
                             const std::array<double, 3>& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm3(const std::array<double, 3>& a) { return std::sqrt(dot3(a, a)); }

// Monotone chain on doubles with relative tolerance; returns ccw hull.
std::vector<std::array<double, 3>> hull2_double(
    std::vector<std::array<double, 3>> pts, double tol) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [&](const auto& a, const auto& b) {
                          return std::fabs(a[0] - b[0]) <= tol &&
                                 std::fabs(a[1] - b[1]) <= tol;
                        }),
            pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  std::vector<std::array<double, 3>> h(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= tol) --k;
    h[k++] = p;
  }
  for (size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i]) <= tol) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return h;
}

void facets_from_poly2(ConvexBody& b) {
  b.facets.clear();
  size_t m = b.vertices.size();
  if (m < 2) return;
  for (size_t i = 0; i < m; ++i) {
    const auto& p = b.vertices[i];
    const auto& q = b.vertices[(i + 1) % m];
    // Outward normal of ccw edge p->q.
    double nx = q[1] - p[1], ny = -(q[0] - p[0]);
    double len = std::hypot(nx, ny);
    if (len == 0.0) continue;
    nx /= len;
    ny /= len;
    b.facets.push_back({{nx, ny, 0.0}, nx * p[0] + ny * p[1]});
  }
}

}  // namespace

ConvexBody ConvexBody::interval(double a, double b) {
  if (b < a) std::swap(a, b);
  ConvexBody body;
  body.n = 1;
  body.vertices = {{a, 0, 0}, {b, 0, 0}};
  body.facets = {{{-1, 0, 0}, -a}, {{1, 0, 0}, b}};
  body.degenerate = (b - a) <= 0.0;
  return body;
}

ConvexBody ConvexBody::box2(double ax, double bx, double ay, double by) {
  ConvexBody body;
  body.n = 2;
  body.vertices = {{ax, ay, 0}, {bx, ay, 0}, {bx, by, 0}, {ax, by, 0}};
  facets_from_poly2(body);
  body.degenerate = (bx - ax) <= 0.0 || (by - ay) <= 0.0;
  return body;
}

ConvexBody ConvexBody::simplex2(double d) {
  ConvexBody body;
  body.n = 2;
  body.vertices = {{0, 0, 0}, {d, 0, 0}, {0, d, 0}};
  facets_from_poly2(body);
  body.degenerate = d <= 0.0;
  return body;
}

ConvexBody ConvexBody::from_points(int n,
                                   const std::vector<std::array<double, 3>>& pts) {
  if (pts.empty()) throw std::invalid_argument("convex hull of empty point set");
  ConvexBody body;
  body.n = n;
  if (n == 1) {
    double lo = pts[0][0], hi = pts[0][0];
    for (const auto& p : pts) {
      lo = std::min(lo, p[0]);
      hi = std::max(hi, p[0]);
    }
    body = interval(lo, hi);
    return body;
  }
  if (n == 2) {
    double scale = 0.0;
    for (const auto& p : pts)
      scale = std::max({scale, std::fabs(p[0]), std::fabs(p[1])});
    double tol = 1e-12 * std::max(1.0, scale);
    body.vertices = hull2_double(pts, tol);
    body.degenerate = body.vertices.size() < 3;
    if (body.degenerate && body.vertices.size() == 2) {
      // Segment: keep the two endpoints, no area facets.
      body.facets.clear();
      return body;
    }
    facets_from_poly2(body);
    return body;
  }
  if (n == 3) {
    // Brute-force facet enumeration with a robust-orientation tolerance.
    // Intended for desk-scale vertex sets.
    std::vector<std::array<double, 3>> P = pts;
    std::sort(P.begin(), P.end());
    P.erase(std::unique(P.begin(), P.end()), P.end());
    double scale = 1.0;
    for (const auto& p : P)
      scale = std::max({scale, std::fabs(p[0]), std::fabs(p[1]), std::fabs(p[2])});
    double tol = 1e-9 * scale;
    size_t m = P.size();
    std::vector<Facet> facets;
    for (size_t i = 0; i < m; ++i)
      for (size_t j = i + 1; j < m; ++j)
        for (size_t k = j + 1; k < m; ++k) {
          auto nrm = cross3(sub3(P[j], P[i]), sub3(P[k], P[i]));
          double len = norm3(nrm);
          if (len <= tol) continue;
          for (auto& c : nrm) c /= len;
          double off = dot3(nrm, P[i]);
          bool all_below = true, all_above = true;
          for (size_t t = 0; t < m; ++t) {
            double s = dot3(nrm, P[t]) - off;
            if (s > tol) all_below = false;
            if (s < -tol) all_above = false;
            if (!all_below && !all_above) break;
          }
          if (!all_below && !all_above) continue;
          Facet f;
          f.normal = nrm;
          f.offset = off;
          if (all_above) {
            for (auto& c : f.normal) c = -c;
            f.offset = -off;
          }
          bool dup = false;
          for (const auto& g : facets)
            if (std::fabs(g.normal[0] - f.normal[0]) < 1e-9 &&
                std::fabs(g.normal[1] - f.normal[1]) < 1e-9 &&
                std::fabs(g.normal[2] - f.normal[2]) < 1e-9 &&
                std::fabs(g.offset - f.offset) < 1e-9 * scale)
              dup = true;
          if (!dup) facets.push_back(f);
        }
    body.facets = facets;
    // A point is a vertex iff its incident facet normals span 3-space;
    // points interior to faces or edges are not extreme.
    for (size_t t = 0; t < m; ++t) {
      std::vector<std::array<double, 3>> normals;
      for (const auto& f : facets)
        if (std::fabs(dot3(f.normal, P[t]) - f.offset) <= tol)
          normals.push_back(f.normal);
      bool extreme = false;
      for (size_t a = 0; a < normals.size() && !extreme; ++a)
        for (size_t b2 = a + 1; b2 < normals.size() && !extreme; ++b2)
          for (size_t c = b2 + 1; c < normals.size() && !extreme; ++c)
            if (std::fabs(dot3(normals[a], cross3(normals[b2], normals[c]))) > 1e-9)
              extreme = true;
      if (extreme) body.vertices.push_back(P[t]);
    }
    body.degenerate = facets.size() < 4 || body.vertices.size() < 4;
    if (body.degenerate) body.vertices = P;
    return body;
  }
  throw std::invalid_argument("ConvexBody: dimension must be 1..3");
}

ConvexBody ConvexBody::from_rational_points(int n,
                                            const std::vector<RationalPoint>& pts) {
  if (pts.empty()) throw std::invalid_argument("convex hull of empty point set");
  ConvexBody body;
  body.n = n;
  if (n == 1) {
    RationalPoint lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
      if (rational_less(p, lo)) lo = p;
      if (rational_less(hi, p)) hi = p;
    }
    return interval(rp_coord(lo, 0), rp_coord(hi, 0));
  }
  if (n != 2)
    throw std::invalid_argument("from_rational_points: exact path is for n <= 2");
  std::vector<RationalPoint> P = pts;
  std::sort(P.begin(), P.end(), rational_less);
  P.erase(std::unique(P.begin(), P.end(), rational_eq), P.end());
  if (P.size() < 3) {
    for (const auto& p : P)
      body.vertices.push_back({rp_coord(p, 0), rp_coord(p, 1), 0});
    body.degenerate = true;
    return body;
  }
  std::vector<RationalPoint> h(2 * P.size());
  size_t k = 0;
  for (const auto& p : P) {
    while (k >= 2 && orient2_exact(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (size_t i = P.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && orient2_exact(h[k - 2], h[k - 1], P[i]) <= 0) --k;
    h[k++] = P[i];
  }
  h.resize(k - 1);
  for (const auto& p : h)
    body.vertices.push_back({rp_coord(p, 0), rp_coord(p, 1), 0});
  body.degenerate = body.vertices.size() < 3;
  if (!body.degenerate) facets_from_poly2(body);
  return body;
}

bool ConvexBody::contains(const std::array<double, 3>& x, double tol) const {
  if (facets.empty()) {
    // Degenerate body: fall back to vertex proximity for points/segments.
    for (const auto& v : vertices) {
      double d2 = 0;
      for (int i = 0; i < n; ++i) d2 += (v[i] - x[i]) * (v[i] - x[i]);
      if (std::sqrt(d2) <= tol) return true;
    }
    if (n >= 1 && vertices.size() == 2) {
      // Segment membership.
      auto a = vertices[0], b = vertices[1];
      auto ab = sub3(b, a), ax = sub3(x, a);
      double t = dot3(ab, ax) / std::max(dot3(ab, ab), 1e-300);
      if (t < -tol || t > 1 + tol) return false;
      std::array<double, 3> proj{a[0] + t * ab[0], a[1] + t * ab[1],
                                 a[2] + t * ab[2]};
      return norm3(sub3(x, proj)) <= tol;
    }
    return false;
  }
  for (const auto& f : facets)
    if (dot3(f.normal, x) > f.offset + tol) return false;
  return true;
}

double ConvexBody::distance_to_boundary(const std::array<double, 3>& x) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& f : facets) d = std::min(d, f.offset - dot3(f.normal, x));
  return d;
}

double ConvexBody::volume() const {
  if (degenerate) return 0.0;
  if (n == 1) return vertices[1][0] - vertices[0][0];
  if (n == 2) {
    double a = 0.0;
    size_t m = vertices.size();
    for (size_t i = 0; i < m; ++i) {
      const auto& p = vertices[i];
      const auto& q = vertices[(i + 1) % m];
      a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * std::fabs(a);
  }
  // n == 3: sum signed tetrahedra from the centroid over each facet's
  // angularly ordered vertex ring.
  auto c = centroid();
  double vol = 0.0;
  for (const auto& f : facets) {
    std::vector<std::array<double, 3>> ring;
    for (const auto& v : vertices)
      if (std::fabs(dot3(f.normal, v) - f.offset) <= 1e-8 * std::max(1.0, std::fabs(f.offset)))
        ring.push_back(v);
    if (ring.size() < 3) continue;
    // Order around the facet centroid.
    std::array<double, 3> fc{0, 0, 0};
    for (const auto& v : ring)
      for (int i = 0; i < 3; ++i) fc[i] += v[i] / double(ring.size());
    std::array<double, 3> u = sub3(ring[0], fc);
    double un = norm3(u);
    for (auto& ui : u) ui /= std::max(un, 1e-300);
    auto w = cross3(f.normal, u);
    std::sort(ring.begin(), ring.end(), [&](const auto& a, const auto& b) {
      auto da = sub3(a, fc), db = sub3(b, fc);
      return std::atan2(dot3(da, w), dot3(da, u)) <
             std::atan2(dot3(db, w), dot3(db, u));
    });
    for (size_t i = 0; i < ring.size(); ++i) {
      const auto& p = ring[i];
      const auto& q = ring[(i + 1) % ring.size()];
      vol += dot3(sub3(p, c), cross3(sub3(q, c), sub3(fc, c))) / 6.0;
    }
  }
  return std::fabs(vol);
}

double ConvexBody::support(const std::array<double, 3>& u) const {
  double s = -std::numeric_limits<double>::infinity();
  for (const auto& v : vertices) s = std::max(s, dot3(u, v));
  return s;
}

ConvexBody ConvexBody::scaled(double m) const {
  ConvexBody b = *this;
  for (auto& v : b.vertices)
    for (int i = 0; i < n; ++i) v[i] *= m;
  for (auto& f : b.facets) f.offset *= m;
  return b;
}

bool ConvexBody::approx_equal(const ConvexBody& other, double tol) const {
  if (n != other.n) return false;
  for (const auto& v : vertices)
    if (!other.contains(v, tol)) return false;
  for (const auto& v : other.vertices)
    if (!contains(v, tol)) return false;
  return true;
}

std::vector<std::array<std::int64_t, 3>> ConvexBody::lattice_points(
    std::int64_t k) const {
  std::array<double, 3> lo{}, hi{};
  bounding_box(lo, hi);
  std::array<std::int64_t, 3> ilo{0, 0, 0}, ihi{0, 0, 0};
  for (int i = 0; i < n; ++i) {
    ilo[i] = std::int64_t(std::ceil(lo[i] * k - 1e-9));
    ihi[i] = std::int64_t(std::floor(hi[i] * k + 1e-9));
  }
  std::vector<std::array<std::int64_t, 3>> out;
  std::array<std::int64_t, 3> m{0, 0, 0};
  double tol = 1e-9;
  if (n == 1) {
    for (m[0] = ilo[0]; m[0] <= ihi[0]; ++m[0])
      if (contains({double(m[0]) / k, 0, 0}, tol)) out.push_back(m);
  } else if (n == 2) {
    for (m[0] = ilo[0]; m[0] <= ihi[0]; ++m[0])
      for (m[1] = ilo[1]; m[1] <= ihi[1]; ++m[1])
        if (contains({double(m[0]) / k, double(m[1]) / k, 0}, tol)) out.push_back(m);
  } else {
    for (m[0] = ilo[0]; m[0] <= ihi[0]; ++m[0])
      for (m[1] = ilo[1]; m[1] <= ihi[1]; ++m[1])
        for (m[2] = ilo[2]; m[2] <= ihi[2]; ++m[2])
          if (contains({double(m[0]) / k, double(m[1]) / k, double(m[2]) / k}, tol))
            out.push_back(m);
  }
  return out;
}

std::array<double, 3> ConvexBody::centroid() const {
  std::array<double, 3> c{0, 0, 0};
  for (const auto& v : vertices)
    for (int i = 0; i < 3; ++i) c[i] += v[i] / double(vertices.size());
  return c;
}

void ConvexBody::bounding_box(std::array<double, 3>& lo,
                              std::array<double, 3>& hi) const {
  lo = {0, 0, 0};
  hi = {0, 0, 0};
  for (int i = 0; i < n; ++i) {
    lo[i] = std::numeric_limits<double>::infinity();
    hi[i] = -std::numeric_limits<double>::infinity();
  }
  for (const auto& v : vertices)
    for (int i = 0; i < n; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
}

}  // namespace okb
