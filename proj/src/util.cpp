#include "okb/util.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdio>

namespace okb {

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return std::string(buf);
}

double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol, int max_iter) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

MaxResult scan_max(const std::function<double(double)>& f, double a, double b,
                   int n_scan, double tol) {
  MaxResult best;
  if (b < a) std::swap(a, b);
  double h = (n_scan > 1) ? (b - a) / (n_scan - 1) : 0.0;
  int best_i = 0;
  for (int i = 0; i < n_scan; ++i) {
    double x = a + i * h;
    double v = f(x);
    if (v > best.value) {
      best.value = v;
      best.x = x;
      best_i = i;
    }
  }
  double lo = a + std::max(0, best_i - 1) * h;
  double hi = a + std::min(n_scan - 1, best_i + 1) * h;
  if (hi > lo) {
    double x = golden_max(f, lo, hi, tol);
    double v = f(x);
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
  }
  return best;
}

double log_sum_exp(const std::vector<double>& a) {
  LogSumExp acc;
  for (double v : a) acc.add(v);
  return acc.value();
}

std::vector<double> lsq_fit(const std::vector<double>& x,
                            const std::vector<double>& y,
                            const std::vector<std::function<double(double)>>& basis) {
  const int n = int(x.size());
  const int m = int(basis.size());
  if (n < m) throw std::invalid_argument("lsq_fit: underdetermined fit");
  Eigen::MatrixXd A(n, m);
  Eigen::VectorXd b(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) A(i, j) = basis[j](x[i]);
    b(i) = y[i];
  }
  Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return std::vector<double>(c.data(), c.data() + m);
}

}  // namespace okb
