#pragma once

#include <functional>
#include <vector>

namespace okb {

// Gauss-Legendre nodes and weights on [x1,x2].
void gauss_legendre(double x1, double x2, std::vector<double>& x,
                    std::vector<double>& w, int n);

struct Panel1D {
  std::vector<double> x;
  std::vector<double> w;
};

// Composite Gauss-Legendre rule: [a,b] split into n_panels panels,
// order nodes each.
Panel1D composite_gl(double a, double b, int n_panels, int order);

// Integrate f on [a,b] with adaptive panel splitting (relative tolerance
// on the panel sums). Deterministic.
double integrate_adaptive(const std::function<double(double)>& f, double a,
                          double b, double rel_tol = 1e-10, int max_depth = 30);

}  // namespace okb
