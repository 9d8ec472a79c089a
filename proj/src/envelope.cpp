#include "okb/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "okb/util.hpp"

namespace okb {

SubadditiveTable::SubadditiveTable(
    GradedSemigroup sg, std::int64_t horizon,
    const std::function<double(const std::array<std::int64_t, 3>&, std::int64_t)>& fn)
    : sg_(std::move(sg)), horizon_(horizon) {
  sg_.enumerate_levels(horizon_);
  values_.resize(std::size_t(horizon_) + 1);
  for (std::int64_t k = 1; k <= horizon_; ++k) {
    const auto& sl = sg_.slice(k);
    values_[std::size_t(k)].reserve(sl.size());
    for (const auto& a : sl) values_[std::size_t(k)].push_back(fn(a, k));
  }
}

bool SubadditiveTable::has(const std::array<std::int64_t, 3>& alpha,
                           std::int64_t k) const {
  if (k < 1 || k > horizon_) return false;
  return sg_.contains(alpha, k);
}

double SubadditiveTable::value(const std::array<std::int64_t, 3>& alpha,
                               std::int64_t k) const {
  const auto& sl = sg_.slice(k);
  auto it = std::lower_bound(sl.begin(), sl.end(), alpha);
  if (it == sl.end() || *it != alpha)
    throw std::out_of_range("SubadditiveTable: point not stored");
  return values_[std::size_t(k)][std::size_t(it - sl.begin())];
}

SubadditivityAudit SubadditiveTable::audit_subadditivity(std::size_t max_pairs,
                                                         double tol) const {
  SubadditivityAudit out;
  // Deterministic stride over stored pairs (a,k1) x (b,k2).
  std::size_t total = 0;
  for (std::int64_t k = 1; k <= horizon_; ++k) total += sg_.slice(k).size();
  std::size_t stride = 1;
  if (total > 1 && total * total > max_pairs)
    stride = std::max<std::size_t>(1, total * total / max_pairs);
  SplitMix64 rng(12345);
  std::size_t tick = 0;
  for (std::int64_t k1 = 1; k1 <= horizon_; ++k1) {
    const auto& s1 = sg_.slice(k1);
    for (std::size_t i1 = 0; i1 < s1.size(); ++i1) {
      for (std::int64_t k2 = k1; k2 + k1 <= horizon_; ++k2) {
        const auto& s2 = sg_.slice(k2);
        for (std::size_t i2 = 0; i2 < s2.size(); ++i2) {
          if (stride > 1 && (tick++ % stride) != rng.next() % stride) continue;
          std::array<std::int64_t, 3> sum{0, 0, 0};
          for (int c = 0; c < sg_.dim(); ++c) sum[c] = s1[i1][c] + s2[i2][c];
          std::int64_t ks = k1 + k2;
          if (!sg_.contains(sum, ks)) continue;
          double excess = value(sum, ks) - values_[std::size_t(k1)][i1] -
                          values_[std::size_t(k2)][i2];
          ++out.pairs_checked;
          if (excess > out.worst_excess) out.worst_excess = excess;
        }
      }
    }
  }
  out.pass = out.worst_excess <= tol;
  return out;
}

double SubadditiveTable::fitted_lower_bound_constant() const {
  double c = std::numeric_limits<double>::infinity();
  for (std::int64_t k = 1; k <= horizon_; ++k) {
    const auto& sl = sg_.slice(k);
    for (std::size_t i = 0; i < sl.size(); ++i) {
      std::int64_t abs_alpha = 0;
      for (int cdx = 0; cdx < sg_.dim(); ++cdx) abs_alpha += sl[i][cdx];
      double denom = double(k + abs_alpha);
      c = std::min(c, values_[std::size_t(k)][i] / denom);
    }
  }
  return c;
}

SubadditiveTable binomial_table(std::int64_t horizon) {
  return SubadditiveTable(
      p1_semigroup(), horizon,
      [](const std::array<std::int64_t, 3>& a, std::int64_t k) {
        return -ln_binomial(k, a[0]);
      });
}

ChebyshevField envelope_estimate(const SubadditiveTable& table, std::int64_t K,
                                 int cells_per_axis, int margin_cells) {
  if (K > table.horizon())
    throw std::invalid_argument("envelope_estimate: table not filled to K");
  const auto& sg = table.semigroup();
  ConvexBody body = sg.okounkov_body(K).body;
  ChebyshevField f = ChebyshevField::over_interior(body, cells_per_axis, margin_cells);
  const double h = f.grid.h;
  const int nx = f.grid.counts[0];
  const int ny = std::max(1, f.grid.counts[1]);
  const double inf = std::numeric_limits<double>::infinity();
  // Per node: the nearest stored point within one grid cell wins; distance
  // ties keep the smaller value. Exact lattice hits therefore dominate on
  // aligned grids.
  std::vector<double> best_dist(f.node_count(), inf);
  std::vector<double> best_val(f.node_count(), inf);
  for (std::int64_t k = 1; k <= K; ++k) {
    const auto& sl = sg.slice(k);
    for (const auto& a : sl) {
      double p0 = double(a[0]) / k;
      double p1 = (f.grid.n == 2) ? double(a[1]) / k : 0.0;
      double fk = table.value(a, k) / double(k);
      int ic = int(std::lround((p0 - f.grid.origin[0]) / h));
      int jc = (f.grid.n == 2) ? int(std::lround((p1 - f.grid.origin[1]) / h)) : 0;
      for (int dj = -1; dj <= 1; ++dj)
        for (int di = -1; di <= 1; ++di) {
          int i = ic + di, j = jc + dj;
          if (i < 0 || i >= nx || j < 0 || j >= ny) continue;
          auto node = f.node_coord(i, j);
          double dist = std::fabs(p0 - node[0]);
          if (f.grid.n == 2) dist = std::max(dist, std::fabs(p1 - node[1]));
          if (dist > h + 1e-13) continue;
          std::size_t idx = f.index(i, j);
          if (dist < best_dist[idx] - 1e-13 ||
              (dist <= best_dist[idx] + 1e-13 && fk < best_val[idx])) {
            best_dist[idx] = dist;
            best_val[idx] = fk;
          }
        }
    }
  }
  for (std::size_t idx = 0; idx < f.node_count(); ++idx) {
    if (f.state[idx] != NodeState::kMissing) continue;
    if (std::isfinite(best_val[idx])) {
      f.values[idx] = best_val[idx];
      f.state[idx] = NodeState::kPresent;
    }
    // Nodes with no nearby semigroup point stay missing; never interpolated.
  }
  f.convexify(1e-10);
  return f;
}

RayReport ray_monotonicity_report(const SubadditiveTable& table,
                                  const std::array<std::int64_t, 3>& alpha,
                                  std::int64_t k, std::int64_t m_max) {
  RayReport out;
  for (std::int64_t m = 1; m <= m_max && m * k <= table.horizon(); ++m) {
    std::array<std::int64_t, 3> a{alpha[0] * m, alpha[1] * m, alpha[2] * m};
    if (!table.has(a, m * k)) break;
    out.sequence.push_back(table.value(a, m * k) / double(m * k));
  }
  out.nonincreasing = true;
  for (std::size_t i = 1; i < out.sequence.size(); ++i) {
    double inc = out.sequence[i] - out.sequence[i - 1];
    if (inc > out.worst_increase) out.worst_increase = inc;
  }
  out.nonincreasing = out.worst_increase <= 1e-9;
  // Limit estimate: fit v = a + b/m on the tail.
  std::size_t n = out.sequence.size();
  if (n == 0) return out;
  if (n < 4) {
    out.limit_estimate = out.sequence.back();
    return out;
  }
  std::vector<double> xs, ys;
  for (std::size_t m = n / 2; m < n; ++m) {
    xs.push_back(1.0 / double(m + 1));
    ys.push_back(out.sequence[m]);
  }
  auto c = lsq_fit(xs, ys,
                   {[](double) { return 1.0; }, [](double x) { return x; }});
  out.limit_estimate = c[0];
  return out;
}

}  // namespace okb
