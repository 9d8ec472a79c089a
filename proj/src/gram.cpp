#include "okb/gram.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <stdexcept>

#include "okb/quadrature.hpp"
#include "okb/util.hpp"

namespace okb {

namespace {

std::int64_t abs_sum(const std::array<std::int64_t, 3>& a, int n) {
  std::int64_t s = 0;
  for (int i = 0; i < n; ++i) s += a[i];
  return s;
}

bool lex_less(const std::array<std::int64_t, 3>& a,
              const std::array<std::int64_t, 3>& b, int n) {
  for (int i = 0; i < n; ++i)
    if (a[i] != b[i]) return a[i] < b[i];
  return false;
}

bool order_less(const std::array<std::int64_t, 3>& a,
                const std::array<std::int64_t, 3>& b, int n, MonomialOrder ord) {
  if (ord == MonomialOrder::kLex) return lex_less(a, b, n);
  // Inverse graded order: larger total degree first, ties by reversed lex.
  auto sa = abs_sum(a, n), sb = abs_sum(b, n);
  if (sa != sb) return sa > sb;
  return lex_less(b, a, n);
}

}  // namespace

MonomialBasis MonomialBasis::over_polytope(const ConvexBody& polytope,
                                           std::int64_t k, MonomialOrder order) {
  MonomialBasis basis;
  basis.n = polytope.n;
  basis.level = k;
  basis.order = order;
  if (k == 0) {
    // Degree-0 sections are the constants.
    basis.exponents = {{0, 0, 0}};
    return basis;
  }
  basis.exponents = polytope.lattice_points(k);
  std::sort(basis.exponents.begin(), basis.exponents.end(),
            [&](const auto& a, const auto& b) {
              return order_less(a, b, basis.n, order);
            });
  for (std::size_t i = 1; i < basis.exponents.size(); ++i)
    if (basis.exponents[i] == basis.exponents[i - 1])
      throw std::runtime_error("monomial basis: duplicate exponent");
  return basis;
}

ToricWeight bm_reference_weight(const ConvexBody& polytope) {
  std::array<double, 3> lo{}, hi{};
  polytope.bounding_box(lo, hi);
  int n = polytope.n;
  std::vector<GTermPtr> axes;
  for (int i = 0; i < n; ++i) {
    std::array<double, 2> s_lo{0, 0}, s_hi{0, 0};
    s_lo[i] = lo[i] - 0.5;
    s_hi[i] = hi[i] + 0.5;
    axes.push_back(softmax_affine_term(n, {{s_lo, 0.0}, {s_hi, 0.0}}, 2.0));
  }
  ToricWeight w;
  w.n = n;
  if (n == 1)
    w.polytope = ConvexBody::interval(lo[0] - 0.5, hi[0] + 0.5);
  else
    w.polytope = ConvexBody::box2(lo[0] - 0.5, hi[0] + 0.5, lo[1] - 0.5, hi[1] + 0.5);
  w.g = (axes.size() == 1) ? axes[0] : sum_term(axes, {});
  w.convex_hint = true;
  w.name = "bm_reference";
  w.growth_bound = 2.0;
  return w;
}

QuadratureRule bm_rule(const ConvexBody& polytope, std::int64_t k,
                       int order_override) {
  ToricWeight g0 = bm_reference_weight(polytope);
  QuadratureRule rule;
  rule.n = polytope.n;
  rule.density_name = "exp(-2 g0) dx";
  // The reference density decays like e^{-|x|}; 26 keeps the truncated
  // tail near 5e-12 relative even for the boundary exponents.
  double w_half = 26.0 + std::log(double(k) + 1.0);
  double panel = (polytope.n == 1) ? 0.25 : 1.0;
  int order = (polytope.n == 1) ? 12 : 8;
  if (order_override > 0) order = order_override;
  int n_panels = int(std::ceil(2.0 * w_half / panel));
  Panel1D axis = composite_gl(-w_half, w_half, n_panels, order);
  if (polytope.n == 1) {
    for (std::size_t i = 0; i < axis.x.size(); ++i) {
      double density = std::exp(-2.0 * g0.eval1(axis.x[i]));
      rule.nodes.push_back({axis.x[i], 0});
      rule.weights.push_back(axis.w[i] * density);
    }
  } else {
    for (std::size_t j = 0; j < axis.x.size(); ++j)
      for (std::size_t i = 0; i < axis.x.size(); ++i) {
        std::array<double, 2> x{axis.x[i], axis.x[j]};
        double density = std::exp(-2.0 * g0.eval(x));
        rule.nodes.push_back(x);
        rule.weights.push_back(axis.w[i] * axis.w[j] * density);
      }
  }
  for (double w : rule.weights) rule.total_mass += w;
  return rule;
}

double bm_rule_mass_error(const QuadratureRule& rule, const ConvexBody& polytope) {
  // The reference density is separable by construction, so the mass is a
  // product of per-axis integrals.
  std::array<double, 3> lo{}, hi{};
  polytope.bounding_box(lo, hi);
  double ref = 1.0;
  for (int axis = 0; axis < rule.n; ++axis) {
    auto g_axis = softmax_affine_term(
        1, {{{lo[axis] - 0.5, 0}, 0.0}, {{hi[axis] + 0.5, 0}, 0.0}}, 2.0);
    ref *= integrate_adaptive(
        [&](double t) { return std::exp(-2.0 * g_axis->eval({t, 0})); }, -40.0,
        40.0, 1e-12);
  }
  return std::fabs(rule.total_mass - ref) / ref;
}

DiagonalGram gram_diagonal(const MonomialBasis& basis, const ToricWeight& weight,
                           const QuadratureRule& mu) {
  if (basis.n != weight.n || mu.n != weight.n)
    throw std::invalid_argument("gram_diagonal: dimension mismatch");
  const std::int64_t k = basis.level;
  DiagonalGram out;
  out.level = k;
  out.exponents = basis.exponents;
  out.log_diag.reserve(basis.exponents.size());
  // Precompute -2k g(x) + ln w per node; each entry adds 2k<a,x>.
  std::vector<double> base(mu.nodes.size());
  for (std::size_t q = 0; q < mu.nodes.size(); ++q)
    base[q] = -2.0 * double(k) * weight.eval(mu.nodes[q]) + std::log(mu.weights[q]);
  for (const auto& a : basis.exponents) {
    LogSumExp acc;
    for (std::size_t q = 0; q < mu.nodes.size(); ++q) {
      double dot = double(a[0]) * mu.nodes[q][0];
      if (weight.n == 2) dot += double(a[1]) * mu.nodes[q][1];
      acc.add(2.0 * dot + base[q]);
    }
    out.log_diag.push_back(acc.value());
  }
  return out;
}

Eigen::MatrixXcd gram_dense_circle(std::int64_t k,
                                   const std::function<double(double)>& q,
                                   int angle_grid) {
  const int dim = int(k) + 1;
  Eigen::MatrixXcd g = Eigen::MatrixXcd::Zero(dim, dim);
  // Toeplitz structure: G_ij depends on i-j only.
  std::vector<std::complex<double>> fourier(2 * dim - 1);
  for (int d = -(dim - 1); d <= dim - 1; ++d) {
    std::complex<double> acc(0, 0);
    for (int t = 0; t < angle_grid; ++t) {
      double th = 2.0 * M_PI * t / angle_grid;
      acc += std::polar(1.0, d * th) * std::exp(-double(k) * q(th));
    }
    fourier[std::size_t(d + dim - 1)] = acc / double(angle_grid);
  }
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) g(i, j) = fourier[std::size_t(i - j + dim - 1)];
  return g;
}

GramFactorization minimal_sections(const Eigen::MatrixXcd& gram,
                                   MonomialOrder order, std::int64_t level) {
  const int dim = int(gram.rows());
  if (gram.cols() != dim) throw std::invalid_argument("minimal_sections: not square");
  GramFactorization out;
  out.level = level;
  out.order = order;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram,
                                                     Eigen::EigenvaluesOnly);
  double lmin = es.eigenvalues().minCoeff();
  double lmax = es.eigenvalues().maxCoeff();
  out.condition_estimate = (lmin > 0) ? lmax / lmin : INFINITY;
  if (lmin <= 0)
    throw std::runtime_error(
        "minimal_sections: Gram matrix numerically singular (condition estimate " +
        std::to_string(out.condition_estimate) + ")");
  // Reverse the basis so the Cholesky pivots give the squared norms of the
  // residuals against the span of the order-later elements.
  Eigen::MatrixXcd rev(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) rev(i, j) = gram(dim - 1 - i, dim - 1 - j);
  Eigen::LLT<Eigen::MatrixXcd> llt(rev);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("minimal_sections: Cholesky failed (condition estimate " +
                             std::to_string(out.condition_estimate) + ")");
  Eigen::MatrixXcd l = llt.matrixL();
  out.log_diag.assign(std::size_t(dim), 0.0);
  for (int i = 0; i < dim; ++i)
    out.log_diag[std::size_t(dim - 1 - i)] = 2.0 * std::log(std::real(l(i, i)));
  return out;
}

GramFactorization minimal_sections(const DiagonalGram& gram, MonomialOrder order) {
  GramFactorization out;
  out.level = gram.level;
  out.order = order;
  out.diagonal_input = true;
  out.log_diag = gram.log_diag;
  double lo = INFINITY, hi = -INFINITY;
  for (double v : gram.log_diag) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  out.condition_estimate = std::exp(hi - lo);
  return out;
}

double log_det_lu(const Eigen::MatrixXcd& gram) {
  Eigen::FullPivLU<Eigen::MatrixXcd> lu(gram);
  double s = 0.0;
  for (int i = 0; i < gram.rows(); ++i)
    s += std::log(std::abs(lu.matrixLU()(i, i)));
  return s;
}

ChebyshevField discrete_chebyshev_field(const ToricWeight& weight, std::int64_t k) {
  MonomialBasis basis = MonomialBasis::over_polytope(weight.polytope, k);
  QuadratureRule mu = bm_rule(weight.polytope, k);
  DiagonalGram gram = gram_diagonal(basis, weight, mu);
  std::array<double, 3> lo{}, hi{};
  weight.polytope.bounding_box(lo, hi);
  int cells = int(std::lround((hi[0] - lo[0]) * double(k)));
  ChebyshevField f = ChebyshevField::over_interior(weight.polytope, cells, 0);
  for (std::size_t idx = 0; idx < basis.exponents.size(); ++idx) {
    const auto& a = basis.exponents[idx];
    int i = int(std::lround((double(a[0]) / k - f.grid.origin[0]) / f.grid.h));
    int j = (weight.n == 2)
                ? int(std::lround((double(a[1]) / k - f.grid.origin[1]) / f.grid.h))
                : 0;
    std::size_t node = f.index(i, j);
    f.values[node] = gram.log_diag[idx] / double(k);
    f.state[node] = NodeState::kPresent;
  }
  return f;
}

LkResult donaldson_lk(const ToricWeight& w_psi, const ToricWeight& w_phi,
                      std::int64_t k, int quad_order) {
  if (!w_psi.polytope.approx_equal(w_phi.polytope, 1e-9))
    throw std::invalid_argument("donaldson_lk: weights must share the polytope");
  MonomialBasis basis = MonomialBasis::over_polytope(w_psi.polytope, k);
  QuadratureRule mu = bm_rule(w_psi.polytope, k, quad_order);
  DiagonalGram g_psi = gram_diagonal(basis, w_psi, mu);
  DiagonalGram g_phi = gram_diagonal(basis, w_phi, mu);
  const int n = w_psi.n;
  double nfact = (n <= 1) ? 1.0 : 2.0;
  double sum_ck = 0.0, log_det_psi = 0.0, log_det_phi = 0.0;
  for (std::size_t i = 0; i < g_psi.log_diag.size(); ++i) {
    sum_ck += (g_psi.log_diag[i] - g_phi.log_diag[i]) / double(k);
    log_det_psi += g_psi.log_diag[i];
    log_det_phi += g_phi.log_diag[i];
  }
  LkResult out;
  out.k = k;
  out.sum_form = nfact / std::pow(double(k), n) * sum_ck;
  out.det_form = nfact / (2.0 * std::pow(double(k), n + 1)) *
                 (log_det_psi - log_det_phi);
  out.ratio = (out.det_form != 0.0) ? out.sum_form / out.det_form : 0.0;
  return out;
}

LkLadder donaldson_ladder(const ToricWeight& w_psi, const ToricWeight& w_phi,
                          const std::vector<std::int64_t>& ks, int quad_order) {
  for (std::size_t i = 1; i < ks.size(); ++i)
    if (ks[i] <= ks[i - 1])
      throw std::invalid_argument("donaldson_ladder: levels must strictly increase");
  LkLadder out;
  out.route_a_value = energy_legendre(w_psi, w_phi).value;
  double ratio_acc = 0.0;
  int ratio_cnt = 0;
  for (std::int64_t k : ks) {
    out.rows.push_back(donaldson_lk(w_psi, w_phi, k, quad_order));
    out.gaps.push_back(std::fabs(out.rows.back().sum_form - out.route_a_value));
    if (out.rows.back().ratio != 0.0) {
      ratio_acc += out.rows.back().ratio;
      ++ratio_cnt;
    }
  }
  out.fitted_ratio = ratio_cnt ? ratio_acc / ratio_cnt : 0.0;
  return out;
}

std::string LkLadder::to_csv() const {
  std::string s = "k,lk_sum_form,lk_det_form,route_A_value,gap\n";
  char buf[160];
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g,%.12g\n",
                  static_cast<long long>(rows[i].k), rows[i].sum_form,
                  rows[i].det_form, route_a_value, gaps[i]);
    s += buf;
  }
  return s;
}

SandwichReport sandwich_check(const ToricWeight& weight, std::int64_t k,
                              double epsilon) {
  SandwichReport out;
  out.k = k;
  out.epsilon = epsilon;
  MonomialBasis basis = MonomialBasis::over_polytope(weight.polytope, k);
  QuadratureRule mu = bm_rule(weight.polytope, k);
  DiagonalGram gram = gram_diagonal(basis, weight, mu);
  double ln_mass = std::log(mu.total_mass);
  for (std::size_t i = 0; i < basis.exponents.size(); ++i) {
    const auto& a = basis.exponents[i];
    std::array<double, 2> p{double(a[0]) / k,
                            weight.n == 2 ? double(a[1]) / k : 0.0};
    double f_sup = 2.0 * double(k) * legendre(weight, p);
    double f_mu = gram.log_diag[i];
    double upper_excess = f_mu - (f_sup + ln_mass);
    if (upper_excess > out.worst_upper_excess) out.worst_upper_excess = upper_excess;
    if (upper_excess > 1e-6) {
      out.upper_ok = false;
      out.upper_violations.push_back(a);
    }
    double needed = f_sup - epsilon * double(k) - f_mu;
    if (needed > out.fitted_ln_c) out.fitted_ln_c = needed;
  }
  return out;
}

}  // namespace okb
