#include "okb/toric.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "okb/quadrature.hpp"
#include "okb/util.hpp"

namespace okb {

namespace {

using Vec2 = std::array<double, 2>;

double dot2(const Vec2& a, const Vec2& b, int n) {
  double s = a[0] * b[0];
  if (n == 2) s += a[1] * b[1];
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Weight terms
// ---------------------------------------------------------------------------

namespace {

class FubiniStudyTerm final : public GTerm {
 public:
  FubiniStudyTerm(int n, double scale) : n_(n), scale_(scale) {}
  double eval(const Vec2& x) const override {
    LogSumExp lse;
    lse.add(0.0);
    for (int i = 0; i < n_; ++i) lse.add(2.0 * x[i]);
    return 0.5 * scale_ * lse.value();
  }
  int dim() const override { return n_; }
  double scale() const { return scale_; }

 private:
  int n_;
  double scale_;
};

class MaxAffineTerm final : public GTerm {
 public:
  MaxAffineTerm(int n, std::vector<std::pair<Vec2, double>> pieces)
      : n_(n), pieces_(std::move(pieces)) {
    if (pieces_.empty()) throw std::invalid_argument("max_affine: no pieces");
  }
  double eval(const Vec2& x) const override {
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : pieces_) m = std::max(m, dot2(a, x, n_) + b);
    return m;
  }
  int dim() const override { return n_; }
  const std::vector<std::pair<Vec2, double>>& pieces() const { return pieces_; }
  std::vector<std::pair<double, double>> kinks_1d() const override {
    if (n_ != 1) return {};
    // Upper envelope of lines sorted by slope; kinks where the active
    // piece changes, weight = slope jump.
    auto ps = pieces_;
    std::sort(ps.begin(), ps.end(), [](const auto& l, const auto& r) {
      if (l.first[0] != r.first[0]) return l.first[0] < r.first[0];
      return l.second < r.second;
    });
    std::vector<std::pair<Vec2, double>> env;
    for (const auto& p : ps) {
      if (!env.empty() && env.back().first[0] == p.first[0]) env.pop_back();
      while (env.size() >= 2) {
        const auto& a = env[env.size() - 2];
        const auto& b = env.back();
        // Intersection of a and p must be right of intersection of a and b.
        double xab = (a.second - b.second) / (b.first[0] - a.first[0]);
        double xap = (a.second - p.second) / (p.first[0] - a.first[0]);
        if (xap <= xab)
          env.pop_back();
        else
          break;
      }
      env.push_back(p);
    }
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i + 1 < env.size(); ++i) {
      double x = (env[i].second - env[i + 1].second) /
                 (env[i + 1].first[0] - env[i].first[0]);
      out.push_back({x, env[i + 1].first[0] - env[i].first[0]});
    }
    return out;
  }

 private:
  int n_;
  std::vector<std::pair<Vec2, double>> pieces_;
};

class SoftmaxAffineTerm final : public GTerm {
 public:
  SoftmaxAffineTerm(int n, std::vector<std::pair<Vec2, double>> pieces, double s)
      : n_(n), pieces_(std::move(pieces)), s_(s) {
    if (pieces_.empty() || s_ <= 0)
      throw std::invalid_argument("softmax_affine: bad parameters");
  }
  double eval(const Vec2& x) const override {
    LogSumExp lse;
    for (const auto& [a, b] : pieces_) lse.add(s_ * (dot2(a, x, n_) + b));
    return lse.value() / s_;
  }
  int dim() const override { return n_; }

 private:
  int n_;
  std::vector<std::pair<Vec2, double>> pieces_;
  double s_;
};

class QuadraticTerm final : public GTerm {
 public:
  QuadraticTerm(int n, double c) : n_(n), c_(c) {}
  double eval(const Vec2& x) const override {
    return 0.5 * c_ * dot2(x, x, n_);
  }
  int dim() const override { return n_; }

 private:
  int n_;
  double c_;
};

class QuadraticBumpTerm final : public GTerm {
 public:
  QuadraticBumpTerm(int n, Vec2 c, double w, double h)
      : n_(n), c_(c), w_(w), h_(h) {
    if (w_ <= 0) throw std::invalid_argument("quadratic_bump: width must be > 0");
  }
  double eval(const Vec2& x) const override {
    double d2 = 0;
    for (int i = 0; i < n_; ++i) d2 += sqr(x[i] - c_[i]);
    double u2 = d2 / (w_ * w_);
    if (u2 >= 1.0) return 0.0;
    return h_ * sqr(1.0 - u2);
  }
  int dim() const override { return n_; }

 private:
  int n_;
  Vec2 c_;
  double w_, h_;
};

class CappedQuadraticTerm final : public GTerm {
 public:
  CappedQuadraticTerm(double lo, double hi) : lo_(lo), hi_(hi) {
    if (hi_ <= lo_) throw std::invalid_argument("capped_quadratic: hi <= lo");
  }
  double eval(const Vec2& x) const override {
    // Antiderivative of clamp(t, lo, hi), normalized so the quadratic
    // core is t^2/2.
    double t = x[0];
    if (t <= lo_) return lo_ * t - 0.5 * lo_ * lo_;
    if (t >= hi_) return hi_ * t - 0.5 * hi_ * hi_;
    return 0.5 * t * t;
  }
  int dim() const override { return 1; }

 private:
  double lo_, hi_;
};

class ConstantTerm final : public GTerm {
 public:
  ConstantTerm(int n, double v) : n_(n), v_(v) {}
  double eval(const Vec2&) const override { return v_; }
  int dim() const override { return n_; }

 private:
  int n_;
  double v_;
};

class SumTerm final : public GTerm {
 public:
  SumTerm(std::vector<GTermPtr> terms, std::vector<double> coeffs)
      : terms_(std::move(terms)), coeffs_(std::move(coeffs)) {
    if (terms_.empty()) throw std::invalid_argument("sum term: no terms");
    if (coeffs_.empty()) coeffs_.assign(terms_.size(), 1.0);
    if (coeffs_.size() != terms_.size())
      throw std::invalid_argument("sum term: coeff count mismatch");
  }
  double eval(const Vec2& x) const override {
    double s = 0;
    for (std::size_t i = 0; i < terms_.size(); ++i)
      s += coeffs_[i] * terms_[i]->eval(x);
    return s;
  }
  int dim() const override { return terms_[0]->dim(); }

 private:
  std::vector<GTermPtr> terms_;
  std::vector<double> coeffs_;
};

class PiecewiseLinearTerm final : public GTerm {
 public:
  PiecewiseLinearTerm(std::vector<double> xs, std::vector<double> ys)
      : xs_(std::move(xs)), ys_(std::move(ys)) {
    if (xs_.size() != ys_.size() || xs_.size() < 2)
      throw std::invalid_argument("piecewise_linear: need >= 2 breakpoints");
  }
  double eval(const Vec2& x) const override {
    double t = x[0];
    if (t <= xs_.front())
      return ys_.front() + slope(0) * (t - xs_.front());
    if (t >= xs_.back())
      return ys_.back() + slope(xs_.size() - 2) * (t - xs_.back());
    std::size_t i =
        std::size_t(std::upper_bound(xs_.begin(), xs_.end(), t) - xs_.begin()) - 1;
    return ys_[i] + slope(i) * (t - xs_[i]);
  }
  int dim() const override { return 1; }
  std::vector<std::pair<double, double>> kinks_1d() const override {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 1; i + 1 < xs_.size(); ++i) {
      double jump = slope(i) - slope(i - 1);
      if (jump > 0) out.push_back({xs_[i], jump});
    }
    return out;
  }
  double slope(std::size_t i) const {
    return (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
  }
  const std::vector<double>& xs() const { return xs_; }

 private:
  std::vector<double> xs_, ys_;
};

class ScaledTerm final : public GTerm {
 public:
  ScaledTerm(GTermPtr base, double c) : base_(std::move(base)), c_(c) {}
  double eval(const Vec2& x) const override { return c_ * base_->eval(x); }
  int dim() const override { return base_->dim(); }
  std::vector<std::pair<double, double>> kinks_1d() const override {
    auto ks = base_->kinks_1d();
    for (auto& [x, m] : ks) m *= c_;
    return ks;
  }

 private:
  GTermPtr base_;
  double c_;
};

}  // namespace

GTermPtr fubini_study_term(int n, double scale) {
  return std::make_shared<FubiniStudyTerm>(n, scale);
}
GTermPtr max_affine_term(int n, std::vector<std::pair<Vec2, double>> pieces) {
  return std::make_shared<MaxAffineTerm>(n, std::move(pieces));
}
GTermPtr softmax_affine_term(int n, std::vector<std::pair<Vec2, double>> pieces,
                             double sharpness) {
  return std::make_shared<SoftmaxAffineTerm>(n, std::move(pieces), sharpness);
}
GTermPtr quadratic_term(int n, double coeff) {
  return std::make_shared<QuadraticTerm>(n, coeff);
}
GTermPtr quadratic_bump_term(int n, Vec2 center, double width, double height) {
  return std::make_shared<QuadraticBumpTerm>(n, center, width, height);
}
GTermPtr capped_quadratic_term(double lo, double hi) {
  return std::make_shared<CappedQuadraticTerm>(lo, hi);
}
GTermPtr constant_term(int n, double value) {
  return std::make_shared<ConstantTerm>(n, value);
}
GTermPtr sum_term(std::vector<GTermPtr> terms, std::vector<double> coeffs) {
  return std::make_shared<SumTerm>(std::move(terms), std::move(coeffs));
}
GTermPtr piecewise_linear_term(std::vector<double> xs, std::vector<double> ys) {
  return std::make_shared<PiecewiseLinearTerm>(std::move(xs), std::move(ys));
}
GTermPtr scaled_term(GTermPtr base, double coeff) {
  return std::make_shared<ScaledTerm>(std::move(base), coeff);
}

// ---------------------------------------------------------------------------
// Weights
// ---------------------------------------------------------------------------

namespace {

double measure_growth_bound(const ToricWeight& w) {
  double worst = 0.0;
  for (double r : {5.0, 15.0, 30.0}) {
    int dirs = (w.n == 1) ? 2 : 64;
    for (int t = 0; t < dirs; ++t) {
      Vec2 u{0, 0};
      if (w.n == 1)
        u[0] = (t == 0) ? -1.0 : 1.0;
      else {
        double ang = 2.0 * M_PI * t / dirs;
        u = {std::cos(ang), std::sin(ang)};
      }
      Vec2 x{r * u[0], r * u[1]};
      double h = w.polytope.support({x[0], x[1], 0});
      worst = std::max(worst, std::fabs(w.eval(x) - h));
    }
  }
  return worst;
}

}  // namespace

ToricWeight fubini_study_weight(int n, double scale) {
  ToricWeight w;
  w.n = n;
  w.polytope = (n == 1) ? ConvexBody::interval(0.0, scale)
                        : ConvexBody::simplex2(scale);
  w.g = fubini_study_term(n, scale);
  w.convex_hint = true;
  w.name = "fubini_study";
  w.growth_bound = measure_growth_bound(w) + 1.0;
  return w;
}

ToricWeight max_affine_weight(int n, std::vector<std::pair<Vec2, double>> pieces) {
  ToricWeight w;
  w.n = n;
  std::vector<std::array<double, 3>> slopes;
  for (const auto& [a, b] : pieces) slopes.push_back({a[0], a[1], 0});
  w.polytope = ConvexBody::from_points(n, slopes);
  w.g = max_affine_term(n, std::move(pieces));
  w.convex_hint = true;
  w.name = "max_affine";
  w.growth_bound = measure_growth_bound(w) + 1.0;
  return w;
}

ToricWeight capped_quadratic_weight(double lo, double hi) {
  ToricWeight w;
  w.n = 1;
  w.polytope = ConvexBody::interval(lo, hi);
  w.g = capped_quadratic_term(lo, hi);
  w.convex_hint = true;
  w.name = "capped_quadratic";
  w.growth_bound = measure_growth_bound(w) + 1.0;
  return w;
}

ToricWeight shifted_weight(const ToricWeight& w, double c) {
  ToricWeight out = w;
  out.g = sum_term({w.g, constant_term(w.n, 1.0)}, {1.0, 0.5 * c});
  out.name = w.name + "+const";
  out.projected = false;
  return out;
}

ToricWeight perturbed_weight(const ToricWeight& w, const GTermPtr& u, double t) {
  ToricWeight out = w;
  out.g = sum_term({w.g, u}, {1.0, 0.5 * t});
  out.convex_hint = false;
  out.projected = false;
  out.name = w.name + "+perturbation";
  return out;
}

ToricWeight scaled_weight(const ToricWeight& w, double t) {
  ToricWeight out = w;
  out.g = scaled_term(w.g, t);
  out.polytope = w.polytope.scaled(t);
  out.growth_bound = w.growth_bound * t;
  out.name = w.name + "*scaled";
  out.projected = false;
  return out;
}

GrowthCheck validate_growth(const ToricWeight& w) {
  GrowthCheck out;
  out.measured_bound = measure_growth_bound(w);
  out.ok = out.measured_bound <= w.growth_bound + 1e-9;
  return out;
}

bool validate_convexity(const ToricWeight& w, std::uint64_t seed, int segments) {
  SplitMix64 rng(seed);
  for (int s = 0; s < segments; ++s) {
    Vec2 a{rng.uniform(-8, 8), 0}, b{rng.uniform(-8, 8), 0};
    if (w.n == 2) {
      a[1] = rng.uniform(-8, 8);
      b[1] = rng.uniform(-8, 8);
    }
    Vec2 m{0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])};
    if (w.eval(m) > 0.5 * (w.eval(a) + w.eval(b)) + 1e-9) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Legendre transform
// ---------------------------------------------------------------------------

namespace {

constexpr double kBoxCap = 60.0;

SearchBox default_box(const ToricWeight& w, const Vec2& p) {
  double m = w.polytope.distance_to_boundary({p[0], p[1], 0});
  m = std::max(m, 1e-9);
  double hw = (2.0 * w.growth_bound + std::fabs(std::log(std::min(m, 1.0))) + 1.0) / m;
  hw = std::min(hw, kBoxCap);
  SearchBox box;
  box.lo = {-hw, -hw};
  box.hi = {hw, hw};
  return box;
}

// Damped Newton ascent with finite-difference derivatives; used to finish
// smooth concave 2-D maximizations after the coordinate stage. Steps that
// do not improve are rejected, so kinked objectives degrade gracefully.
double newton_polish_2d(const std::function<double(const Vec2&)>& f, Vec2& x,
                        double fd_h = 1e-5, int iters = 12) {
  double best = f(x);
  for (int it = 0; it < iters; ++it) {
    double f0 = f(x);
    double fpx = f({x[0] + fd_h, x[1]}), fmx = f({x[0] - fd_h, x[1]});
    double fpy = f({x[0], x[1] + fd_h}), fmy = f({x[0], x[1] - fd_h});
    double gx = (fpx - fmx) / (2 * fd_h), gy = (fpy - fmy) / (2 * fd_h);
    double hxx = (fpx - 2 * f0 + fmx) / (fd_h * fd_h);
    double hyy = (fpy - 2 * f0 + fmy) / (fd_h * fd_h);
    double fpp = f({x[0] + fd_h, x[1] + fd_h});
    double fpm = f({x[0] + fd_h, x[1] - fd_h});
    double fmp = f({x[0] - fd_h, x[1] + fd_h});
    double fmm = f({x[0] - fd_h, x[1] - fd_h});
    double hxy = (fpp - fpm - fmp + fmm) / (4 * fd_h * fd_h);
    double det = hxx * hyy - hxy * hxy;
    if (!(hxx < 0.0) || !(det > 0.0)) break;
    double dx = (-gx * hyy + gy * hxy) / det;
    double dy = (gx * hxy - gy * hxx) / det;
    double step = 1.0;
    bool moved = false;
    for (int t = 0; t < 12; ++t, step *= 0.5) {
      Vec2 y{x[0] + step * dx, x[1] + step * dy};
      double v = f(y);
      if (v > best) {
        best = v;
        x = y;
        moved = true;
        break;
      }
    }
    if (!moved || std::hypot(dx, dy) < 1e-10) break;
  }
  return best;
}

// Coordinate-wise golden ascent from x within per-axis spans.
double coordinate_polish(const std::function<double(const Vec2&)>& f, Vec2& x,
                         int n, double span, int rounds) {
  double best = f(x);
  for (int r = 0; r < rounds; ++r) {
    for (int axis = 0; axis < n; ++axis) {
      Vec2 y = x;
      double xi = golden_max(
          [&](double t) {
            y[axis] = t;
            return f(y);
          },
          x[axis] - span, x[axis] + span, 1e-9);
      y[axis] = xi;
      double v = f(y);
      if (v >= best) {
        best = v;
        x = y;
      }
    }
    span *= 0.25;
  }
  return best;
}

}  // namespace

double legendre(const ToricWeight& w, const Vec2& p,
                const std::optional<SearchBox>& box_opt) {
  if (!w.polytope.contains({p[0], p[1], 0}, 1e-9))
    throw std::invalid_argument("legendre: point outside the slope polytope");
  SearchBox box = box_opt ? *box_opt : default_box(w, p);
  auto objective = [&](const Vec2& x) { return dot2(p, x, w.n) - w.eval(x); };
  if (w.n == 1) {
    auto f1 = [&](double x) { return objective({x, 0}); };
    return scan_max(f1, box.lo[0], box.hi[0], 257, 1e-10).value;
  }
  // n = 2: coarse scan then coordinate ascent.
  int grid = 33;
  Vec2 best{box.lo[0], box.lo[1]};
  double best_v = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      Vec2 x{box.lo[0] + (box.hi[0] - box.lo[0]) * i / (grid - 1),
             box.lo[1] + (box.hi[1] - box.lo[1]) * j / (grid - 1)};
      double v = objective(x);
      if (v > best_v) {
        best_v = v;
        best = x;
      }
    }
  double cell = (box.hi[0] - box.lo[0]) / (grid - 1);
  double v = coordinate_polish(objective, best, 2, 2.0 * cell, 5);
  return std::max(v, newton_polish_2d(objective, best));
}

ChebyshevField chebyshev_toric(const ToricWeight& w, int cells_per_axis,
                               int margin_cells) {
  auto growth = validate_growth(w);
  if (!growth.ok)
    throw std::invalid_argument(
        "chebyshev_toric: weight violates the declared growth bound (measured " +
        std::to_string(growth.measured_bound) + ")");
  ChebyshevField f = ChebyshevField::over_interior(w.polytope, cells_per_axis,
                                                   margin_cells);
  const int ny = std::max(1, f.grid.counts[1]);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < f.grid.counts[0]; ++i) {
      auto idx = f.index(i, j);
      if (f.state[idx] != NodeState::kMissing) continue;
      auto p = f.node_coord(i, j);
      f.values[idx] = 2.0 * legendre(w, {p[0], p[1]});
      f.state[idx] = NodeState::kPresent;
    }
  f.convexified = true;
  auto audit = f.audit_convexity(1e-8);
  if (!audit.pass)
    throw std::runtime_error("chebyshev_toric: convexity audit failed, violation " +
                             std::to_string(audit.worst_violation));
  return f;
}

// ---------------------------------------------------------------------------
// Psh projection
// ---------------------------------------------------------------------------

namespace {

constexpr double kProjWindow = 26.0;
constexpr double kProjStep = 1e-3;

bool slopes_within_polytope(const ToricWeight& w) {
  double h = 1e-4;
  if (w.n == 1) {
    double a = w.polytope.vertices.front()[0];
    double b = w.polytope.vertices.back()[0];
    double sl = (w.eval1(-kProjWindow + h) - w.eval1(-kProjWindow)) / h;
    double sr = (w.eval1(kProjWindow) - w.eval1(kProjWindow - h)) / h;
    return sl >= a - 1e-7 && sr <= b + 1e-7;
  }
  for (int t = 0; t < 32; ++t) {
    double ang = 2.0 * M_PI * t / 32;
    Vec2 u{std::cos(ang), std::sin(ang)};
    Vec2 x{kProjWindow * u[0], kProjWindow * u[1]};
    Vec2 xh{x[0] + h * u[0], x[1] + h * u[1]};
    double dir_slope = (w.eval(xh) - w.eval(x)) / h;
    if (dir_slope > w.polytope.support({u[0], u[1], 0}) + 1e-6) return false;
  }
  return true;
}

}  // namespace

ToricWeight psh_projection_toric(const ToricWeight& w) {
  if (w.projected) return w;
  if (w.convex_hint && validate_convexity(w) && slopes_within_polytope(w)) {
    ToricWeight out = w;
    out.projected = true;
    return out;
  }
  if (w.n == 1) {
    // Lower convex hull of dense samples; the result is the double
    // conjugate with slopes confined to the polytope.
    int n = int(2 * kProjWindow / kProjStep) + 1;
    std::vector<double> xs(n), ys(n);
    for (int i = 0; i < n; ++i) {
      xs[i] = -kProjWindow + i * kProjStep;
      ys[i] = w.eval1(xs[i]);
    }
    std::vector<int> hull;
    for (int i = 0; i < n; ++i) {
      while (hull.size() >= 2) {
        int a = hull[hull.size() - 2], b = hull.back();
        double s_ab = (ys[b] - ys[a]) / (xs[b] - xs[a]);
        double s_bp = (ys[i] - ys[b]) / (xs[i] - xs[b]);
        if (s_ab >= s_bp)
          hull.pop_back();
        else
          break;
      }
      hull.push_back(i);
    }
    std::vector<double> hx, hy;
    for (int i : hull) {
      hx.push_back(xs[i]);
      hy.push_back(ys[i]);
    }
    ToricWeight out = w;
    out.g = piecewise_linear_term(std::move(hx), std::move(hy));
    out.convex_hint = true;
    out.projected = true;
    out.name = w.name + "|P";
    return out;
  }
  // n = 2 fallback: max-affine double conjugate on a polytope grid.
  std::array<double, 3> lo{}, hi{};
  w.polytope.bounding_box(lo, hi);
  int grid = 65;
  std::vector<std::pair<Vec2, double>> pieces;
  double hx = (hi[0] - lo[0]) / (grid - 1);
  double hy = (hi[1] - lo[1]) / (grid - 1);
  for (int j = 0; j < grid; ++j)
    for (int i = 0; i < grid; ++i) {
      Vec2 p{lo[0] + i * hx, lo[1] + j * hy};
      if (!w.polytope.contains({p[0], p[1], 0}, 1e-12)) continue;
      double gstar = legendre(w, p);
      pieces.push_back({p, -gstar});
    }
  ToricWeight out = w;
  out.g = max_affine_term(2, std::move(pieces));
  out.convex_hint = true;
  out.projected = true;
  out.name = w.name + "|P";
  return out;
}

// ---------------------------------------------------------------------------
// Monge-Ampere pushforward (n = 1)
// ---------------------------------------------------------------------------

double ToricMeasure1D::integrate(const std::function<double(double)>& u) const {
  double s = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
    if (density[i] != 0.0) s += u(xs[i]) * density[i] * grid_h;
  for (const auto& [x, m] : atoms) s += u(x) * m;
  return s;
}

ToricMeasure1D ma_pushforward_1d(const ToricWeight& w_in) {
  if (w_in.n != 1)
    throw std::invalid_argument("ma_pushforward_1d: n must be 1");
  ToricMeasure1D out;
  ToricWeight w = w_in;
  if (!w.projected) {
    w = psh_projection_toric(w_in);
    out.auto_projected = true;
  }
  auto kinks = w.g->kinks_1d();
  if (!kinks.empty()) {
    out.atoms = kinks;
    for (const auto& [x, m] : out.atoms) {
      (void)x;
      out.total_mass += m;
    }
    return out;
  }
  // Step sized so that float cancellation in the second difference stays
  // well under the clip tolerance at |g| ~ window.
  const double W = kProjWindow;
  const double h = 2e-3;
  int n = int(2 * W / h) + 1;
  out.grid_h = h;
  out.xs.resize(n);
  out.density.resize(n);
  double prev = w.eval1(-W - h), cur = w.eval1(-W);
  for (int i = 0; i < n; ++i) {
    double x = -W + i * h;
    double next = w.eval1(x + h);
    double dd = (next - 2.0 * cur + prev) / (h * h);
    if (dd < -1e-8)
      throw std::runtime_error(
          "ma_pushforward_1d: negative second difference beyond tolerance");
    out.xs[i] = x;
    out.density[i] = std::max(dd, 0.0);
    prev = cur;
    cur = next;
  }
  for (double d : out.density) out.total_mass += d * h;
  return out;
}

// ---------------------------------------------------------------------------
// Energies
// ---------------------------------------------------------------------------

namespace {

double factorial(int n) { return (n <= 1) ? 1.0 : n * factorial(n - 1); }

// Lagrange extrapolation of (delta_i, q_i) to delta = 0.
double extrapolate_to_zero(const std::vector<double>& deltas,
                           const std::vector<double>& qs) {
  double v = 0.0;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    double term = qs[i];
    for (std::size_t j = 0; j < deltas.size(); ++j)
      if (j != i) term *= (0.0 - deltas[j]) / (deltas[i] - deltas[j]);
    v += term;
  }
  return v;
}

enum class Domain2 { kBox, kTriangle };

Domain2 classify2(const ConvexBody& poly) {
  if (poly.vertices.size() == 3) return Domain2::kTriangle;
  if (poly.vertices.size() == 4) return Domain2::kBox;
  throw std::invalid_argument(
      "energy quadrature: polytope must be an interval, box or triangle");
}

}  // namespace

EnergyResult energy_legendre(const ToricWeight& w_psi, const ToricWeight& w_phi,
                             const EnergyOptions& opts) {
  if (w_psi.n != w_phi.n ||
      !w_psi.polytope.approx_equal(w_phi.polytope, 1e-9))
    throw std::invalid_argument("energy: weights must share the slope polytope");
  const int n = w_psi.n;
  auto integrand = [&](const Vec2& p) {
    return 2.0 * (legendre(w_psi, p) - legendre(w_phi, p));
  };
  std::vector<double> margins = opts.margins;
  if (margins.empty()) margins = {4e-3, 2e-3, 1e-3};
  std::vector<double> qs;
  EnergyResult out;
  out.route = "legendre";
  if (n == 1) {
    double a = w_psi.polytope.vertices.front()[0];
    double b = w_psi.polytope.vertices.back()[0];
    double extent = b - a;
    std::vector<double> x, wq;
    for (double dm : margins) {
      double d = dm * extent;
      gauss_legendre(a + d, b - d, x, wq, opts.gl_order);
      double s = 0;
      for (int i = 0; i < opts.gl_order; ++i) s += wq[i] * integrand({x[i], 0});
      qs.push_back(s);
    }
  } else {
    Domain2 kind = classify2(w_psi.polytope);
    std::vector<double> gx, gw;
    gauss_legendre(0.0, 1.0, gx, gw, opts.gl_order >= 32 ? 32 : opts.gl_order);
    int m = int(gx.size());
    for (double dm : margins) {
      double s = 0;
      if (kind == Domain2::kBox) {
        std::array<double, 3> lo{}, hi{};
        w_psi.polytope.bounding_box(lo, hi);
        double dx = dm * (hi[0] - lo[0]), dy = dm * (hi[1] - lo[1]);
        double ax = lo[0] + dx, bx = hi[0] - dx, ay = lo[1] + dy, by = hi[1] - dy;
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < m; ++i) {
            Vec2 p{ax + (bx - ax) * gx[i], ay + (by - ay) * gx[j]};
            s += gw[i] * gw[j] * (bx - ax) * (by - ay) * integrand(p);
          }
      } else {
        // Shrink the triangle about its centroid, then integrate with a
        // collapsed-square (Duffy) rule.
        auto c = w_psi.polytope.centroid();
        std::array<Vec2, 3> v;
        for (int t = 0; t < 3; ++t) {
          const auto& vv = w_psi.polytope.vertices[t];
          v[t] = {c[0] + (1.0 - 2.0 * dm) * (vv[0] - c[0]),
                  c[1] + (1.0 - 2.0 * dm) * (vv[1] - c[1])};
        }
        double area = 0.5 * std::fabs((v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) -
                                      (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]));
        for (int j = 0; j < m; ++j)
          for (int i = 0; i < m; ++i) {
            double u = gx[i], t = gx[j] * (1.0 - u);
            Vec2 p{v[0][0] + u * (v[1][0] - v[0][0]) + t * (v[2][0] - v[0][0]),
                   v[0][1] + u * (v[1][1] - v[0][1]) + t * (v[2][1] - v[0][1])};
            s += gw[i] * gw[j] * (1.0 - u) * 2.0 * area * integrand(p);
          }
      }
      qs.push_back(s);
    }
  }
  double extrap = extrapolate_to_zero(margins, qs);
  out.value = factorial(n) * extrap;
  out.error_estimate = std::fabs(factorial(n) * (extrap - qs.back()));
  return out;
}

EnergyResult energy_ma_1d(const ToricWeight& w_psi, const ToricWeight& w_phi) {
  if (w_psi.n != 1 || w_phi.n != 1)
    throw std::invalid_argument("energy_ma_1d: n must be 1");
  if (!w_psi.polytope.approx_equal(w_phi.polytope, 1e-9))
    throw std::invalid_argument("energy: weights must share the slope polytope");
  EnergyResult out;
  out.route = "ma_1d";
  ToricWeight psi = w_psi.projected ? w_psi : psh_projection_toric(w_psi);
  ToricWeight phi = w_phi.projected ? w_phi : psh_projection_toric(w_phi);
  out.auto_projected = !w_psi.projected || !w_phi.projected;
  auto mu_psi = ma_pushforward_1d(psi);
  auto mu_phi = ma_pushforward_1d(phi);
  out.mass_psi = mu_psi.total_mass;
  out.mass_phi = mu_phi.total_mass;
  double extent = w_psi.polytope.vertices.back()[0] - w_psi.polytope.vertices.front()[0];
  if (std::fabs(out.mass_psi - extent) > 1e-6 ||
      std::fabs(out.mass_phi - extent) > 1e-6)
    throw std::runtime_error("energy_ma_1d: MA mass check failed");
  auto diff = [&](double x) { return phi.eval1(x) - psi.eval1(x); };
  out.value = mu_psi.integrate(diff) + mu_phi.integrate(diff);
  out.error_estimate = 1e-6 * std::max(1.0, std::fabs(out.value));
  return out;
}

DerivativeReport derivative_check_1d(const ToricWeight& w_psi,
                                     const ToricWeight& w_phi, const GTermPtr& u,
                                     double t_step) {
  if (w_psi.n != 1)
    throw std::invalid_argument("derivative_check_1d: n must be 1");
  DerivativeReport out;
  out.t_step = t_step;
  auto f = [&](double t) {
    return energy_legendre(w_phi, perturbed_weight(w_psi, u, t)).value;
  };
  auto central = [&](double h) { return (f(h) - f(-h)) / (2.0 * h); };
  double d1 = central(t_step);
  double d2 = central(0.5 * t_step);
  out.fd_value = (4.0 * d2 - d1) / 3.0;
  auto mu = ma_pushforward_1d(psh_projection_toric(w_psi));
  out.formula_value = mu.integrate([&](double x) { return u->eval({x, 0}); });
  out.difference = out.fd_value - out.formula_value;
  return out;
}

ZeroFiberReport zero_fiber_restriction(const ToricWeight& w, double alpha,
                                       double cutoff1, double cutoff2) {
  if (w.n != 2)
    throw std::invalid_argument("zero_fiber_restriction: n must be 2");
  std::array<double, 3> lo{}, hi{};
  w.polytope.bounding_box(lo, hi);
  double edge_hi = hi[1];
  if (!(alpha > 0.0 && alpha < edge_hi))
    throw std::invalid_argument("zero_fiber_restriction: alpha must be interior to the zero-fiber edge");
  double m = std::min(alpha, edge_hi - alpha);
  double hw = std::min(kBoxCap, (2.0 * w.growth_bound +
                                 std::fabs(std::log(std::min(m, 1.0))) + 1.0) / m);
  ZeroFiberReport out;
  // Full route: sup over boxes with the x1 wall pushed to the cutoffs.
  // The objective clamps into the box so the polish cannot cross the
  // monitored wall.
  auto sup_at = [&](double x1_lo) {
    auto obj = [&](const Vec2& x) {
      Vec2 y{std::clamp(x[0], x1_lo, 10.0), std::clamp(x[1], -hw, hw)};
      return alpha * y[1] - w.eval(y);
    };
    int grid = 49;
    Vec2 best{x1_lo, -hw};
    double best_v = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j)
      for (int i = 0; i < grid; ++i) {
        Vec2 x{x1_lo + (10.0 - x1_lo) * i / (grid - 1),
               -hw + 2.0 * hw * j / (grid - 1)};
        double v = obj(x);
        if (v > best_v) {
          best_v = v;
          best = x;
        }
      }
    double cell = (10.0 - x1_lo) / (grid - 1);
    double v = coordinate_polish(obj, best, 2, 2.0 * cell, 5);
    return std::max(v, newton_polish_2d(obj, best));
  };
  double v1 = sup_at(cutoff1);
  double v2 = sup_at(cutoff2);
  out.c_full = 2.0 * (v2 + (v2 - v1));
  out.converged = std::fabs(v2 - v1) <= 1e-4;
  // Restricted route: the weight on the zero fiber is the x1 -> -inf limit
  // of the projected weight, taken at the cutoffs with tail extrapolation.
  ToricWeight wp = psh_projection_toric(w);
  auto g_y = [&](double x2) {
    double a = wp.eval({cutoff1, x2});
    double b = wp.eval({cutoff2, x2});
    return b + (b - a);
  };
  auto obj1 = [&](double x2) { return alpha * x2 - g_y(x2); };
  out.c_restricted = 2.0 * scan_max(obj1, -hw, hw, 513, 1e-10).value;
  out.difference = out.c_full - out.c_restricted;
  return out;
}

// ---------------------------------------------------------------------------
// JSON
// ---------------------------------------------------------------------------

namespace {

GTermPtr term_from_json(int n, const nlohmann::json& j);

std::vector<std::pair<Vec2, double>> pieces_from_json(int n,
                                                      const nlohmann::json& j) {
  std::vector<std::pair<Vec2, double>> pieces;
  for (const auto& row : j) {
    if (int(row.size()) != n + 1)
      throw std::invalid_argument("weight JSON: each piece needs n slopes and an offset");
    Vec2 a{0, 0};
    for (int i = 0; i < n; ++i) a[i] = row.at(i).get<double>();
    pieces.push_back({a, row.at(n).get<double>()});
  }
  return pieces;
}

GTermPtr term_from_json(int n, const nlohmann::json& j) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "fubini_study")
    return fubini_study_term(n, j.value("scale", 1.0));
  if (kind == "max_affine")
    return max_affine_term(n, pieces_from_json(n, j.at("pieces")));
  if (kind == "softmax_affine")
    return softmax_affine_term(n, pieces_from_json(n, j.at("pieces")),
                               j.value("sharpness", 2.0));
  if (kind == "quadratic") return quadratic_term(n, j.value("coeff", 1.0));
  if (kind == "quadratic_bump") {
    Vec2 c{0, 0};
    auto cc = j.at("center");
    for (int i = 0; i < n; ++i) c[i] = cc.at(i).get<double>();
    return quadratic_bump_term(n, c, j.at("width").get<double>(),
                               j.at("height").get<double>());
  }
  if (kind == "capped_quadratic")
    return capped_quadratic_term(j.at("lo").get<double>(), j.at("hi").get<double>());
  if (kind == "constant") return constant_term(n, j.at("value").get<double>());
  if (kind == "piecewise_linear")
    return piecewise_linear_term(j.at("xs").get<std::vector<double>>(),
                                 j.at("ys").get<std::vector<double>>());
  if (kind == "scaled")
    return scaled_term(term_from_json(n, j.at("term")), j.at("coeff").get<double>());
  if (kind == "sum") {
    std::vector<GTermPtr> terms;
    for (const auto& t : j.at("terms")) terms.push_back(term_from_json(n, t));
    std::vector<double> coeffs;
    if (j.contains("coeffs")) coeffs = j.at("coeffs").get<std::vector<double>>();
    return sum_term(std::move(terms), std::move(coeffs));
  }
  throw std::invalid_argument("weight JSON: unknown g kind '" + kind + "'");
}

}  // namespace

ToricWeight weight_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ToricWeight w;
  if (!j.contains("n") || !j.contains("polytope") || !j.contains("g"))
    throw std::invalid_argument("weight JSON: required fields are 'n', 'polytope', 'g'");
  w.n = j.at("n").get<int>();
  if (w.n < 1 || w.n > 2)
    throw std::invalid_argument("weight JSON: n must be 1 or 2");
  std::vector<std::array<double, 3>> verts;
  for (const auto& row : j.at("polytope")) {
    std::array<double, 3> v{0, 0, 0};
    for (int i = 0; i < w.n; ++i) v[i] = row.at(i).get<double>();
    verts.push_back(v);
  }
  w.polytope = ConvexBody::from_points(w.n, verts);
  w.g = term_from_json(w.n, j.at("g"));
  w.convex_hint = j.value("convex", false);
  w.name = j.value("name", std::string("weight"));
  if (j.contains("growth_bound"))
    w.growth_bound = j.at("growth_bound").get<double>();
  else
    w.growth_bound = measure_growth_bound(w) + 1.0;
  return w;
}

std::string weight_to_json(const ToricWeight& w) {
  nlohmann::ordered_json j;
  j["n"] = w.n;
  auto poly = nlohmann::ordered_json::array();
  for (const auto& v : w.polytope.vertices) {
    auto row = nlohmann::ordered_json::array();
    for (int i = 0; i < w.n; ++i) row.push_back(v[i]);
    poly.push_back(row);
  }
  j["polytope"] = poly;
  j["g"] = {{"kind", "opaque"}, {"name", w.name}};
  j["convex"] = w.convex_hint;
  j["growth_bound"] = w.growth_bound;
  j["name"] = w.name;
  return j.dump();
}

}  // namespace okb
