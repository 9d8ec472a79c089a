#include "okb/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace okb {

void gauss_legendre(double x1, double x2, std::vector<double>& x,
                    std::vector<double>& w, int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  const double eps = 1e-15;
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  int m = (n + 1) / 2;
  double xm = 0.5 * (x2 + x1);
  double xl = 0.5 * (x2 - x1);
  for (int i = 0; i < m; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double z1, pp;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::fabs(z - z1) > eps);
    x[i] = xm - xl * z;
    x[n - 1 - i] = xm + xl * z;
    w[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}

Panel1D composite_gl(double a, double b, int n_panels, int order) {
  Panel1D rule;
  std::vector<double> x, w;
  double h = (b - a) / n_panels;
  for (int p = 0; p < n_panels; ++p) {
    gauss_legendre(a + p * h, a + (p + 1) * h, x, w, order);
    rule.x.insert(rule.x.end(), x.begin(), x.end());
    rule.w.insert(rule.w.end(), w.begin(), w.end());
  }
  return rule;
}

namespace {

double gl_integrate(const std::function<double(double)>& f, double a, double b,
                    int order) {
  std::vector<double> x, w;
  gauss_legendre(a, b, x, w, order);
  double s = 0.0;
  for (int i = 0; i < order; ++i) s += w[i] * f(x[i]);
  return s;
}

double adapt(const std::function<double(double)>& f, double a, double b,
             double whole, double rel_tol, int depth, int max_depth) {
  double m = 0.5 * (a + b);
  double left = gl_integrate(f, a, m, 16);
  double right = gl_integrate(f, m, b, 16);
  double sum = left + right;
  double scale = std::max({std::fabs(whole), std::fabs(sum), 1e-300});
  if (depth >= max_depth || std::fabs(sum - whole) <= rel_tol * scale)
    return sum;
  return adapt(f, a, m, left, rel_tol, depth + 1, max_depth) +
         adapt(f, m, b, right, rel_tol, depth + 1, max_depth);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol, int max_depth) {
  double whole = gl_integrate(f, a, b, 16);
  return adapt(f, a, b, whole, rel_tol, 0, max_depth);
}

}  // namespace okb
