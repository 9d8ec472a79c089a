#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "okb/gridfn.hpp"
#include "okb/semigroup.hpp"

namespace okb {

struct SubadditivityAudit {
  bool pass = true;
  double worst_excess = 0.0;  // F(a+b) - F(a) - F(b) over the sampled pairs
  std::size_t pairs_checked = 0;
};

// Finite table of values F(k*alpha, k) on the points of a graded
// semigroup, filled to a horizon.
class SubadditiveTable {
 public:
  SubadditiveTable(GradedSemigroup sg, std::int64_t horizon,
                   const std::function<double(const std::array<std::int64_t, 3>&,
                                              std::int64_t)>& fn);

  const GradedSemigroup& semigroup() const { return sg_; }
  std::int64_t horizon() const { return horizon_; }

  bool has(const std::array<std::int64_t, 3>& alpha, std::int64_t k) const;
  double value(const std::array<std::int64_t, 3>& alpha, std::int64_t k) const;

  // F(a+b) <= F(a) + F(b) on sampled stored pairs whose sum is stored.
  SubadditivityAudit audit_subadditivity(std::size_t max_pairs = 200000,
                                         double tol = 1e-9) const;

  // Largest C with F(k alpha, k) >= C (k + k|alpha|) over the table.
  double fitted_lower_bound_constant() const;

 private:
  GradedSemigroup sg_;
  std::int64_t horizon_;
  std::vector<std::vector<double>> values_;  // aligned with sg slices
};

// F(j,k) = -ln binomial(k,j) on the O(1)/P^1 semigroup.
SubadditiveTable binomial_table(std::int64_t horizon);

// Asymptotic transform estimate: per grid node the best stored F(k a,k)/k
// near the node, then the discrete lower convex envelope over the grid.
// Nodes with no nearby semigroup point at any level <= K stay missing.
ChebyshevField envelope_estimate(const SubadditiveTable& table, std::int64_t K,
                                 int cells_per_axis, int margin_cells = 2);

struct RayReport {
  std::vector<double> sequence;  // F(m k alpha, m k)/(m k), m = 1..
  bool nonincreasing = false;
  double worst_increase = 0.0;
  double limit_estimate = 0.0;
};

// Values along the ray through (k alpha, k); nonincreasing by
// subadditivity.
RayReport ray_monotonicity_report(const SubadditiveTable& table,
                                  const std::array<std::int64_t, 3>& alpha,
                                  std::int64_t k, std::int64_t m_max);

}  // namespace okb
