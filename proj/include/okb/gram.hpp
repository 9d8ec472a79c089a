#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "okb/gridfn.hpp"
#include "okb/toric.hpp"

namespace okb {

enum class MonomialOrder { kLex, kInverseGradedLex };

// Exponents of the level-k monomial section basis: lattice points of
// k * polytope, sorted strictly by the declared additive order.
struct MonomialBasis {
  int n = 1;
  std::int64_t level = 1;
  MonomialOrder order = MonomialOrder::kLex;
  std::vector<std::array<std::int64_t, 3>> exponents;

  static MonomialBasis over_polytope(const ConvexBody& polytope, std::int64_t k,
                                     MonomialOrder order = MonomialOrder::kLex);
};

// Discretized positive measure in log coordinates; weights carry the
// density factor so that Int f dmu ~= sum w_i f(x_i).
struct QuadratureRule {
  int n = 1;
  std::vector<std::array<double, 2>> nodes;
  std::vector<double> weights;
  std::string density_name;
  double total_mass = 0.0;
};

// Reference convex weight g0 whose slope range strictly contains the
// polytope (half a unit beyond the bounding box per axis); the
// Bernstein-Markov measure is dmu = e^{-2 g0} dx.
ToricWeight bm_reference_weight(const ConvexBody& polytope);

// Rule for level-k integrands against the measure above. Node count grows
// with k; the total mass is validated against an adaptive reference.
QuadratureRule bm_rule(const ConvexBody& polytope, std::int64_t k,
                       int order_override = 0);
double bm_rule_mass_error(const QuadratureRule& rule, const ConvexBody& polytope);

// Torus-invariant Gram matrix at level k: the monomials are orthogonal,
// so only the diagonal is computed, in the log domain:
//   log_diag[a] = ln Int e^{k(2<a,x> - 2g(x))} dmu.
struct DiagonalGram {
  std::int64_t level = 1;
  std::vector<std::array<std::int64_t, 3>> exponents;
  std::vector<double> log_diag;
};
DiagonalGram gram_diagonal(const MonomialBasis& basis, const ToricWeight& weight,
                           const QuadratureRule& mu);

// Dense Gram path for P^1 with a non-invariant circle weight: sections
// z^0..z^k against exp(-k q(theta)) on the unit circle (trapezoid rule,
// spectrally accurate for periodic integrands).
Eigen::MatrixXcd gram_dense_circle(std::int64_t k,
                                   const std::function<double(double)>& q,
                                   int angle_grid = 2048);

// Triangular factorization data: log ||t_i||^2 for the minimal-norm
// sections t_i = s_i - projection onto the span of the later basis
// elements, processed from the order-maximal element backward.
struct GramFactorization {
  std::int64_t level = 1;
  MonomialOrder order = MonomialOrder::kLex;
  std::vector<double> log_diag;
  double condition_estimate = 1.0;
  bool diagonal_input = false;
  double log_det() const {
    double s = 0;
    for (double v : log_diag) s += v;
    return s;
  }
};

GramFactorization minimal_sections(const Eigen::MatrixXcd& gram,
                                   MonomialOrder order, std::int64_t level);
GramFactorization minimal_sections(const DiagonalGram& gram, MonomialOrder order);

// Independent log-determinant oracle (full-pivot LU).
double log_det_lu(const Eigen::MatrixXcd& gram);

// Discrete Chebyshev field c_k[psi,mu](alpha) = log_diag(alpha)/k on the
// level-k lattice of the slope polytope.
ChebyshevField discrete_chebyshev_field(const ToricWeight& weight, std::int64_t k);

// Donaldson L_k bifunctional. The sum form
//   (n!/k^n) sum over Delta_k of (c_k[psi] - c_k[phi])
// is normative; the determinant form (n!/(2 k^{n+1}))(ln det G_psi -
// ln det G_phi) is reported alongside with their ratio.
struct LkResult {
  std::int64_t k = 0;
  double sum_form = 0.0;
  double det_form = 0.0;
  double ratio = 0.0;
};
LkResult donaldson_lk(const ToricWeight& w_psi, const ToricWeight& w_phi,
                      std::int64_t k, int quad_order = 0);

struct LkLadder {
  std::vector<LkResult> rows;
  double route_a_value = 0.0;  // energy through the Legendre route
  std::vector<double> gaps;    // |sum_form - route_a_value| per row
  double fitted_ratio = 0.0;
  std::string to_csv() const;
};
LkLadder donaldson_ladder(const ToricWeight& w_psi, const ToricWeight& w_phi,
                          const std::vector<std::int64_t>& ks,
                          int quad_order = 0);

// Both Bernstein-Markov sandwich inequalities at level k:
//   F_sup - ln C - eps k <= F_mu <= F_sup + ln mu(X),
// with F_sup(alpha) = 2k g*(alpha) (exact for invariant weights) and
// F_mu = log_diag. Reports the smallest working ln C.
struct SandwichReport {
  std::int64_t k = 0;
  double epsilon = 0.0;
  bool upper_ok = true;
  double worst_upper_excess = 0.0;
  double fitted_ln_c = 0.0;
  std::vector<std::array<std::int64_t, 3>> upper_violations;
};
SandwichReport sandwich_check(const ToricWeight& weight, std::int64_t k,
                              double epsilon);

}  // namespace okb
