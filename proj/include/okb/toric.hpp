#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "okb/convex_body.hpp"
#include "okb/gridfn.hpp"

namespace okb {

// Evaluable term of an invariant weight in log coordinates: g represents
// psi_Theta / 2 on R^n.
class GTerm {
 public:
  virtual ~GTerm() = default;
  virtual double eval(const std::array<double, 2>& x) const = 0;
  virtual int dim() const = 0;
  // Exact kink positions with slope jumps, when the term is piecewise
  // affine in one variable; empty otherwise.
  virtual std::vector<std::pair<double, double>> kinks_1d() const { return {}; }
};
using GTermPtr = std::shared_ptr<const GTerm>;

GTermPtr fubini_study_term(int n, double scale);
GTermPtr max_affine_term(int n, std::vector<std::pair<std::array<double, 2>, double>> pieces);
GTermPtr softmax_affine_term(int n,
                             std::vector<std::pair<std::array<double, 2>, double>> pieces,
                             double sharpness);
GTermPtr quadratic_term(int n, double coeff);
GTermPtr quadratic_bump_term(int n, std::array<double, 2> center, double width,
                             double height);
// n=1; slopes clamp(x, lo, hi): flat left tail, quadratic core, affine
// right tail.
GTermPtr capped_quadratic_term(double lo, double hi);
GTermPtr constant_term(int n, double value);
GTermPtr sum_term(std::vector<GTermPtr> terms, std::vector<double> coeffs);
GTermPtr piecewise_linear_term(std::vector<double> xs, std::vector<double> ys);
// g(t x) as a term (weight t*psi lives on the polytope t*Delta and has
// g_t(x) = t*g(x)).
GTermPtr scaled_term(GTermPtr base, double coeff);

// Invariant weight on a toric line bundle: evaluable g with its declared
// slope polytope.
struct ToricWeight {
  int n = 1;
  ConvexBody polytope;
  GTermPtr g;
  bool convex_hint = false;
  bool projected = false;
  double growth_bound = 1.0;  // declared bound on |g - h_Delta|
  std::string name;

  double eval(const std::array<double, 2>& x) const { return g->eval(x); }
  double eval1(double x) const { return g->eval({x, 0}); }
};

ToricWeight fubini_study_weight(int n, double scale = 1.0);
ToricWeight max_affine_weight(int n,
                              std::vector<std::pair<std::array<double, 2>, double>> pieces);
ToricWeight capped_quadratic_weight(double lo, double hi);
// The weight psi + c (constant shift of the weight; g shifts by c/2).
ToricWeight shifted_weight(const ToricWeight& w, double c);
// psi + t*u for a direction term u given in weight units (g gains t*u/2).
ToricWeight perturbed_weight(const ToricWeight& w, const GTermPtr& u, double t);
// t*psi on t*L.
ToricWeight scaled_weight(const ToricWeight& w, double t);

ToricWeight weight_from_json(const std::string& text);
std::string weight_to_json(const ToricWeight& w);

struct GrowthCheck {
  bool ok = false;
  double measured_bound = 0.0;
};
// |g - h_Delta| sampled on large spheres against the declared bound.
GrowthCheck validate_growth(const ToricWeight& w);
// Midpoint convexity on seeded random segments, tolerance 1e-9.
bool validate_convexity(const ToricWeight& w, std::uint64_t seed = 17,
                        int segments = 256);

struct SearchBox {
  std::array<double, 2> lo{0, 0};
  std::array<double, 2> hi{0, 0};
};

// Legendre value g*(p) = sup_x <p,x> - g(x) over a search box derived
// from the growth bound and the margin to the polytope boundary (or an
// explicit caller box). p must lie in the closed polytope.
double legendre(const ToricWeight& w, const std::array<double, 2>& p,
                const std::optional<SearchBox>& box = std::nullopt);

// Chebyshev transform field on the slope polytope: value 2*g*(p) per grid
// node. The convexity audit must pass.
ChebyshevField chebyshev_toric(const ToricWeight& w, int cells_per_axis = 100,
                               int margin_cells = 2);

// Psh projection: largest convex minorant with slopes restricted to the
// polytope, realized as a double Legendre conjugate. Convex inputs with
// slopes inside the polytope are returned unchanged.
ToricWeight psh_projection_toric(const ToricWeight& w);

struct EnergyResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::string route;
  bool auto_projected = false;
  double mass_psi = 0.0, mass_phi = 0.0;  // MA route mass checks
};

struct EnergyOptions {
  int gl_order = 64;
  std::vector<double> margins;  // relative to the polytope extent; auto if empty
};

// Relative energy of the pair, normalized so that
// energy(psi, psi + 1) = n! * vol(polytope):
//   value = n! * Int over the interior of (c[psi] - c[phi]) d lambda
//         = 2 n! * Int (g_psi^* - g_phi^*).
// Computed on margin-shrunk domains with Richardson extrapolation in the
// margin.
EnergyResult energy_legendre(const ToricWeight& w_psi, const ToricWeight& w_phi,
                             const EnergyOptions& opts = {});

// Same functional through the n=1 Monge-Ampere route:
//   Int (g_phi - g_psi) d(MA(psi) + MA(phi)) on projected weights.
// Non-projected inputs are projected automatically (flagged in the result).
EnergyResult energy_ma_1d(const ToricWeight& w_psi, const ToricWeight& w_phi);

// Pushforward of the Monge-Ampere measure of a projected weight (n=1):
// density g_P'' on a grid plus exact atoms at piecewise-affine kinks.
// Total mass equals the slope interval length.
struct ToricMeasure1D {
  std::vector<double> xs;
  std::vector<double> density;
  double grid_h = 0.0;
  std::vector<std::pair<double, double>> atoms;  // (position, mass)
  double total_mass = 0.0;
  bool auto_projected = false;
  double integrate(const std::function<double(double)>& u) const;
};
ToricMeasure1D ma_pushforward_1d(const ToricWeight& w);

struct DerivativeReport {
  double fd_value = 0.0;
  double formula_value = 0.0;
  double difference = 0.0;
  double t_step = 0.0;
};
// d/dt at t=0 of the relative energy along psi + t*u against phi,
// central finite differences with one Richardson step, compared with
// Int u dMA(P(psi)).
DerivativeReport derivative_check_1d(const ToricWeight& w_psi,
                                     const ToricWeight& w_phi, const GTermPtr& u,
                                     double t_step = 1e-4);

struct ZeroFiberReport {
  double c_full = 0.0;        // 2 sup_x (<(0,alpha),x> - g), x1 -> -inf monitored
  double c_restricted = 0.0;  // Chebyshev transform of the restricted weight
  double difference = 0.0;
  bool converged = true;
};
// n=2 weights on the simplex: Chebyshev value at (0, alpha) against the
// transform of the weight restricted to the zero fiber.
ZeroFiberReport zero_fiber_restriction(const ToricWeight& w, double alpha,
                                       double cutoff1 = -20.0, double cutoff2 = -40.0);

}  // namespace okb
