#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "okb/gridfn.hpp"

namespace okb {

using Complex = std::complex<double>;

// Compact subset of C with a named descriptor; discretizations refine the
// same descriptor deterministically (Chebyshev nodes on intervals, uniform
// angles on circles, boundary ring for discs).
struct CompactSet {
  enum class Kind { kInterval, kCircle, kDisc, kCloud };
  Kind kind = Kind::kInterval;
  double a = -1.0, b = 1.0;  // interval
  double r = 1.0;            // circle / disc radius
  std::vector<Complex> cloud;

  static CompactSet interval(double a, double b);
  static CompactSet circle(double r);
  static CompactSet disc(double r);
  static CompactSet cloud_set(std::vector<Complex> pts);
  static CompactSet from_json(const std::string& text);
  std::string to_json() const;

  std::vector<Complex> discretize(int points) const;
  std::string descriptor() const;
};

struct MonicPolynomial {
  int degree = 0;
  std::vector<Complex> coeffs;  // c[0..degree-1]; leading coefficient is 1
  Complex eval(Complex z) const;
};

struct AdmissibleWeight {
  std::function<double(Complex)> h;
  std::string descriptor;
  static AdmissibleWeight one();
};

struct MinimaxResult {
  double value = 0.0;         // at the refined discretization
  double value_coarse = 0.0;  // before the doubling check
  bool refinement_stable = false;
  bool converged = false;
  int iterations = 0;
  MonicPolynomial poly;
  std::vector<Complex> contacts;
};

// Weighted Chebyshev number Y_k = min over monic degree-k polynomials of
// max over K of |h^k p|, by Lawson-reweighted least squares on a
// discretely orthonormalized basis with a subgradient fallback.
MinimaxResult chebyshev_number(const CompactSet& set, int k,
                               const AdmissibleWeight& h = AdmissibleWeight::one());

struct LadderFit {
  std::vector<std::int64_t> ks;
  std::vector<double> raw;     // Y_k or log d_k
  std::vector<double> roots;   // Y_k^{1/k} or d_k^{1/binom(k,2)}
  double last = 0.0;
  double fitted = 0.0;
  bool warned = false;
  std::string to_csv(const std::string& value_name) const;
};

// C(K) = lim Y_k^{1/k} by a ladder with a 1/k-basis extrapolation fit.
LadderFit chebyshev_constant(const CompactSet& set,
                             const AdmissibleWeight& h, int k_max);

struct LejaResult {
  std::vector<Complex> points;
  double log_dk_greedy = 0.0;
  double log_dk = 0.0;  // after local polish
  bool degenerate = false;
};

// Greedy Leja sequence plus coordinate-wise local polish; products of
// mutual distances accumulated in log space.
LejaResult leja_fekete(const CompactSet& set, int k);

// T(K) = lim d_k^{1/binom(k,2)}; fit basis {1, ln k/k, 1/k} on the ladder
// tail. The exponent follows the displayed binom(k,2) convention.
LadderFit transfinite_diameter(const CompactSet& set, int k_max);

// Field alpha -> 2 ln Y_{k - k alpha} / k on (0,1), with ln Y interpolated
// between adjacent lattice exponents and a 1/k Richardson step across the
// top two usable levels; reports a linear fit in (1-alpha). The default
// grid matches the data resolution (spacing 1/k_max).
struct FieldP1Result {
  ChebyshevField field;
  double fitted_slope = 0.0;  // field ~ fitted_slope * (1 - alpha)
};
FieldP1Result chebyshev_field_p1(const CompactSet& set, int k_max,
                                 int cells = 0);

// Product-style compact subset of C^2.
struct CompactSet2 {
  std::vector<std::array<Complex, 2>> points;
  std::string descriptor;
  static CompactSet2 product(const CompactSet& k1, const CompactSet& k2,
                             int per_axis);
};

struct AdmissibleWeight2 {
  std::function<double(const std::array<Complex, 2>&)> h;
  std::string descriptor;
  static AdmissibleWeight2 one();
};

struct DirectionalResult {
  std::vector<std::int64_t> degrees;
  std::vector<double> taus;  // Y3(alpha)^{1/deg}
  double extrapolated = 0.0;
  bool warned = false;
};

// Directional Chebyshev constant along theta (theta1 + theta2 = 1, both
// positive): minimax over polynomials z^alpha + lower order terms in the
// graded lexicographic order, alpha/deg -> theta.
DirectionalResult directional_chebyshev(const CompactSet2& set,
                                        const AdmissibleWeight2& h,
                                        const std::array<double, 2>& theta,
                                        const std::vector<std::int64_t>& degrees);

}  // namespace okb
