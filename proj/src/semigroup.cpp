#include "okb/semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace okb {

namespace {

constexpr std::int64_t kCoordCap = std::int64_t(1) << 31;

}  // namespace

GradedSemigroup::GradedSemigroup(int d, std::vector<GradedPoint> generators)
    : d_(d), generators_(std::move(generators)) {
  if (d_ < 1 || d_ > 3) throw std::invalid_argument("semigroup: d must be 1..3");
  if (generators_.empty())
    throw std::invalid_argument("semigroup: generator list is empty");
  for (const auto& g : generators_) {
    if (g.level < 1) throw std::invalid_argument("semigroup: level must be >= 1");
    for (int i = 0; i < d_; ++i) {
      if (g.alpha[i] < 0)
        throw std::invalid_argument("semigroup: alpha coordinates must be >= 0");
      if (g.alpha[i] > kCoordCap)
        throw std::invalid_argument(
            "semigroup: coordinate exceeds the 2^31 per-axis cap");
    }
  }
}

void GradedSemigroup::enumerate_levels(std::int64_t k_max) {
  if (k_max < 1) throw std::invalid_argument("enumerate_levels: k_max must be >= 1");
  if (k_max <= horizon_) return;
  levels_.resize(std::size_t(k_max) + 1);
  // DP over levels: slice(k) = union over generators g of slice(k - g.level) + g,
  // seeded by slice(0) = {0}.
  for (std::int64_t k = std::max<std::int64_t>(horizon_ + 1, 1); k <= k_max; ++k) {
    std::vector<std::array<std::int64_t, 3>> pts;
    for (const auto& g : generators_) {
      std::int64_t prev = k - g.level;
      if (prev < 0) continue;
      if (prev == 0) {
        pts.push_back(g.alpha);
        continue;
      }
      for (const auto& base : levels_[std::size_t(prev)]) {
        std::array<std::int64_t, 3> s{0, 0, 0};
        for (int i = 0; i < d_; ++i) {
          s[i] = base[i] + g.alpha[i];
          if (s[i] > kCoordCap)
            throw std::runtime_error(
                "enumerate_levels: coordinate exceeds the 2^31 per-axis cap at level " +
                std::to_string(k));
        }
        pts.push_back(s);
      }
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    levels_[std::size_t(k)] = std::move(pts);
  }
  horizon_ = k_max;
}

const std::vector<std::array<std::int64_t, 3>>& GradedSemigroup::slice(
    std::int64_t k) const {
  if (k < 1 || k > horizon_)
    throw std::out_of_range("slice: level not cached (call enumerate_levels)");
  return levels_[std::size_t(k)];
}

bool GradedSemigroup::contains(const std::array<std::int64_t, 3>& alpha,
                               std::int64_t k) const {
  const auto& s = slice(k);
  return std::binary_search(s.begin(), s.end(), alpha);
}

BodyResult GradedSemigroup::okounkov_body(std::int64_t k_max) const {
  if (k_max > horizon_)
    throw std::invalid_argument("okounkov_body: levels not cached to k_max");
  BodyResult out;
  bool any = false;
  if (d_ <= 2) {
    std::vector<RationalPoint> pts;
    for (std::int64_t k = 1; k <= k_max; ++k)
      for (const auto& a : levels_[std::size_t(k)]) {
        RationalPoint p;
        p.num = a;
        p.den = k;
        pts.push_back(p);
        any = true;
      }
    if (!any) throw std::invalid_argument("okounkov_body: semigroup has no points");
    out.body = ConvexBody::from_rational_points(d_, pts);
  } else {
    std::vector<std::array<double, 3>> pts;
    for (std::int64_t k = 1; k <= k_max; ++k)
      for (const auto& a : levels_[std::size_t(k)]) {
        pts.push_back({double(a[0]) / k, double(a[1]) / k, double(a[2]) / k});
        any = true;
      }
    if (!any) throw std::invalid_argument("okounkov_body: semigroup has no points");
    out.body = ConvexBody::from_points(d_, pts);
  }
  // Monotonicity certificate: every slice point (hence every smaller-horizon
  // hull) lies in the final body.
  out.monotone_certified = true;
  for (std::int64_t k = 1; k <= k_max; ++k)
    for (const auto& a : levels_[std::size_t(k)]) {
      std::array<double, 3> x{double(a[0]) / k, double(a[1]) / k, double(a[2]) / k};
      if (!out.body.contains(x, 1e-12)) {
        out.monotone_certified = false;
        double excess = 0.0;
        for (const auto& f : out.body.facets)
          excess = std::max(excess, f.normal[0] * x[0] + f.normal[1] * x[1] +
                                        f.normal[2] * x[2] - f.offset);
        out.max_violation = std::max(out.max_violation, excess);
      }
    }
  return out;
}

ConvexBody GradedSemigroup::generator_body() const {
  if (d_ <= 2) {
    std::vector<RationalPoint> pts;
    for (const auto& g : generators_) {
      RationalPoint p;
      p.num = g.alpha;
      p.den = g.level;
      pts.push_back(p);
    }
    return ConvexBody::from_rational_points(d_, pts);
  }
  std::vector<std::array<double, 3>> pts;
  for (const auto& g : generators_)
    pts.push_back({double(g.alpha[0]) / g.level, double(g.alpha[1]) / g.level,
                   double(g.alpha[2]) / g.level});
  return ConvexBody::from_points(d_, pts);
}

GroupCheck GradedSemigroup::group_check() const {
  // Hermite-style gcd reduction of the generator rows over Z. The
  // generators span Z^{d+1} iff the reduction has full rank with all
  // pivots +-1.
  GroupCheck out;
  int cols = d_ + 1;
  std::vector<std::array<std::int64_t, 4>> rows;
  for (const auto& g : generators_) {
    std::array<std::int64_t, 4> r{0, 0, 0, 0};
    for (int i = 0; i < d_; ++i) r[i] = g.alpha[i];
    r[d_] = g.level;
    rows.push_back(r);
  }
  int r = 0;
  for (int c = 0; c < cols && r < int(rows.size()); ++c) {
    int piv = -1;
    for (int i = r; i < int(rows.size()); ++i)
      if (rows[i][c] != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(rows[r], rows[piv]);
    for (int i = r + 1; i < int(rows.size()); ++i) {
      while (rows[i][c] != 0) {
        std::int64_t q = rows[r][c] / rows[i][c];
        for (int j = 0; j < cols; ++j) rows[r][j] -= q * rows[i][j];
        std::swap(rows[r], rows[i]);
      }
    }
    out.pivots.push_back(std::llabs(rows[r][c]));
    ++r;
  }
  out.rank = r;
  if (r < cols) {
    out.full = false;
    out.message = "generators span a rank-" + std::to_string(r) +
                  " sublattice of Z^" + std::to_string(cols);
    return out;
  }
  out.full = true;
  for (int i = 0; i < int(out.pivots.size()); ++i) {
    if (out.pivots[i] != 1) {
      out.full = false;
      out.message = "generators span an index-" + std::to_string(out.pivots[i]) +
                    " sublattice: quotient Z/" + std::to_string(out.pivots[i]) +
                    " at pivot column " + std::to_string(i);
      return out;
    }
  }
  return out;
}

ProbeResult GradedSemigroup::khovanskii_threshold_probe(std::int64_t k_lo,
                                                        std::int64_t k_hi,
                                                        double c_cap) const {
  auto gc = group_check();
  if (!gc.full)
    throw std::invalid_argument("khovanskii probe precondition: " + gc.message);
  if (k_hi > horizon_)
    throw std::invalid_argument("khovanskii probe: levels not cached to k_hi");
  ConvexBody body = generator_body();
  if (body.degenerate && d_ > 1)
    throw std::invalid_argument("khovanskii probe: degenerate body");
  ProbeResult out;
  for (std::int64_t k = std::max<std::int64_t>(1, k_lo); k <= k_hi; ++k) {
    auto lattice = body.lattice_points(k);
    const auto& sl = slice(k);
    for (const auto& m : lattice) {
      if (std::binary_search(sl.begin(), sl.end(), m)) continue;
      std::array<double, 3> x{double(m[0]) / k, double(m[1]) / k,
                              double(m[2]) / k};
      double dist = body.distance_to_boundary(x);
      if (dist <= 0) continue;  // boundary points are never required
      double scaled = dist * double(k);
      out.c_min = std::max(out.c_min, scaled);
      if (scaled > c_cap) {
        ProbeViolation v;
        v.point = m;
        v.level = k;
        v.scaled_distance = scaled;
        out.violations.push_back(v);
      }
    }
  }
  out.within_cap = out.c_min <= c_cap;
  return out;
}

CountCheck GradedSemigroup::lattice_point_count_check(std::int64_t k,
                                                      std::int64_t expected) const {
  CountCheck out;
  out.level = k;
  out.slice_size = slice(k).size();
  out.expected = expected;
  out.ok = (std::int64_t(out.slice_size) == expected);
  return out;
}

GradedSemigroup GradedSemigroup::multiple_subsemigroup(std::int64_t m) const {
  if (m < 1) throw std::invalid_argument("multiple_subsemigroup: m must be >= 1");
  // Generate from all cached points at levels divisible by m; at desk scale
  // the cached points themselves serve as generators of the sub-semigroup
  // up to the reachable horizon.
  std::vector<GradedPoint> gens;
  for (std::int64_t k = m; k <= horizon_; k += m)
    for (const auto& a : levels_[std::size_t(k)]) {
      GradedPoint p;
      p.alpha = a;
      p.level = k / m;
      gens.push_back(p);
    }
  if (gens.empty())
    throw std::invalid_argument(
        "multiple_subsemigroup: no cached points at levels divisible by m");
  return GradedSemigroup(d_, std::move(gens));
}

std::vector<double> GradedSemigroup::fill_distance_report(
    const std::vector<std::int64_t>& ks) const {
  ConvexBody body = generator_body();
  // Sample the body on a fine lattice and measure the distance to the
  // nearest slice point among all levels <= K.
  std::int64_t sample_k = 64;
  auto samples = body.lattice_points(sample_k);
  std::vector<double> out;
  for (std::int64_t K : ks) {
    if (K > horizon_) throw std::invalid_argument("fill_distance_report: K beyond horizon");
    double worst = 0.0;
    for (const auto& s : samples) {
      std::array<double, 3> x{double(s[0]) / sample_k, double(s[1]) / sample_k,
                              double(s[2]) / sample_k};
      double best = std::numeric_limits<double>::infinity();
      for (std::int64_t k = 1; k <= K; ++k) {
        for (const auto& a : levels_[std::size_t(k)]) {
          double d2 = 0;
          for (int i = 0; i < d_; ++i) {
            double diff = double(a[i]) / k - x[i];
            d2 += diff * diff;
          }
          best = std::min(best, d2);
        }
      }
      worst = std::max(worst, std::sqrt(best));
    }
    out.push_back(worst);
  }
  return out;
}

GradedSemigroup toric_semigroup(const ConvexBody& polytope) {
  auto pts = polytope.lattice_points(1);
  std::vector<GradedPoint> gens;
  for (const auto& p : pts) {
    GradedPoint g;
    g.alpha = p;
    g.level = 1;
    gens.push_back(g);
  }
  return GradedSemigroup(polytope.n, std::move(gens));
}

GradedSemigroup p1_semigroup() {
  return GradedSemigroup(1, {GradedPoint{{0, 0, 0}, 1}, GradedPoint{{1, 0, 0}, 1}});
}

GradedSemigroup pn_semigroup(int n) {
  if (n == 2) return toric_semigroup(ConvexBody::simplex2(1.0));
  if (n == 3) {
    std::vector<GradedPoint> gens;
    gens.push_back(GradedPoint{{0, 0, 0}, 1});
    gens.push_back(GradedPoint{{1, 0, 0}, 1});
    gens.push_back(GradedPoint{{0, 1, 0}, 1});
    gens.push_back(GradedPoint{{0, 0, 1}, 1});
    return GradedSemigroup(3, std::move(gens));
  }
  throw std::invalid_argument("pn_semigroup: n must be 2 or 3");
}

GradedSemigroup semigroup_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("d") || !j.contains("generators"))
    throw std::invalid_argument("semigroup JSON: required fields are 'd' and 'generators'");
  int d = j.at("d").get<int>();
  std::vector<GradedPoint> gens;
  for (const auto& row : j.at("generators")) {
    if (int(row.size()) != d + 1)
      throw std::invalid_argument(
          "semigroup JSON: each generator row must have d+1 entries [a1..ad,k]");
    GradedPoint g;
    for (int i = 0; i < d; ++i) g.alpha[i] = row.at(i).get<std::int64_t>();
    g.level = row.at(d).get<std::int64_t>();
    gens.push_back(g);
  }
  return GradedSemigroup(d, std::move(gens));
}

std::string semigroup_to_json(const GradedSemigroup& sg) {
  nlohmann::ordered_json j;
  j["d"] = sg.dim();
  auto rows = nlohmann::ordered_json::array();
  for (const auto& g : sg.generators()) {
    auto row = nlohmann::ordered_json::array();
    for (int i = 0; i < sg.dim(); ++i) row.push_back(g.alpha[i]);
    row.push_back(g.level);
    rows.push_back(row);
  }
  j["generators"] = rows;
  return j.dump();
}

}  // namespace okb
