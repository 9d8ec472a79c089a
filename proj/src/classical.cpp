#include "okb/classical.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "okb/util.hpp"

namespace okb {

namespace {

// min over c of max_i |b_i - (Phi c)_i| by Lawson-weighted least squares.
// The basis is re-orthonormalized under the current weights each
// iteration, so monomial conditioning does not enter the inner solve.
struct LawsonOut {
  double value = 0.0;
  bool converged = false;
  int iterations = 0;
  Eigen::VectorXcd residual;
  Eigen::VectorXcd mono_coeffs;  // c with residual = b - Phi c
  std::vector<int> active;
};

LawsonOut lawson_minimax(const Eigen::MatrixXcd& phi, const Eigen::VectorXcd& b,
                         double tol = 1e-7, int max_iter = 2000) {
  const int n = int(b.size());
  const int m = int(phi.cols());
  LawsonOut out;
  if (m == 0) {
    out.residual = b;
    out.value = b.cwiseAbs().maxCoeff();
    out.converged = true;
    out.mono_coeffs = Eigen::VectorXcd::Zero(0);
    for (int i = 0; i < n; ++i)
      if (std::abs(b(i)) >= out.value * (1.0 - 1e-9)) out.active.push_back(i);
    return out;
  }
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
  double best_up = std::numeric_limits<double>::infinity();
  Eigen::VectorXcd best_res, best_coeffs;
  Eigen::VectorXd best_w;
  double gamma = 1.0;
  double prev_up = std::numeric_limits<double>::infinity();
  int rises = 0;
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    // Weighted modified Gram-Schmidt with one reorthogonalization pass.
    Eigen::MatrixXcd q = phi;
    Eigen::MatrixXcd r_mat = Eigen::MatrixXcd::Zero(m, m);
    auto wdot = [&](const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
      std::complex<double> s = 0;
      for (int i = 0; i < n; ++i) s += w(i) * std::conj(u(i)) * v(i);
      return s;
    };
    bool degenerate = false;
    for (int j = 0; j < m && !degenerate; ++j) {
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i < j; ++i) {
          auto s = wdot(q.col(i), q.col(j));
          q.col(j) -= s * q.col(i);
          r_mat(i, j) += s;
        }
      double nrm = std::sqrt(std::real(wdot(q.col(j), q.col(j))));
      if (nrm < 1e-150) {
        degenerate = true;
        break;
      }
      r_mat(j, j) = nrm;
      q.col(j) /= nrm;
    }
    if (degenerate) break;
    Eigen::VectorXcd a(m);
    for (int j = 0; j < m; ++j) a(j) = wdot(q.col(j), b);
    Eigen::VectorXcd res = b - q * a;
    double up = res.cwiseAbs().maxCoeff();
    double low = 0.0;
    for (int i = 0; i < n; ++i) low += w(i) * std::norm(res(i));
    low = std::sqrt(low);
    if (up < best_up) {
      best_up = up;
      best_res = res;
      best_coeffs = r_mat.triangularView<Eigen::Upper>().solve(a);
      best_w = w;
    }
    if (up > 0 && (up - low) <= tol * up) {
      out.converged = true;
      break;
    }
    if (up > prev_up) {
      if (++rises >= 2) {
        gamma = std::max(0.5, gamma * 0.8);
        rises = 0;
      }
    } else {
      rises = 0;
    }
    prev_up = up;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      w(i) = std::max(w(i) * std::pow(std::abs(res(i)), gamma), 1e-300);
      total += w(i);
    }
    w /= total;
  }
  out.value = best_up;
  out.residual = best_res;
  out.mono_coeffs = best_coeffs;
  if (!out.converged && m > 0 && best_res.size() == n) {
    // Subgradient descent on the max modulus from the best iterate.
    Eigen::VectorXcd c = best_coeffs;
    Eigen::VectorXcd res = best_res;
    double row_norm = 0;
    for (int i = 0; i < n; ++i)
      row_norm = std::max(row_norm, phi.row(i).squaredNorm());
    for (int t = 1; t <= 1500; ++t) {
      int mi = 0;
      double up = 0;
      for (int i = 0; i < n; ++i)
        if (std::abs(res(i)) > up) {
          up = std::abs(res(i));
          mi = i;
        }
      if (up < out.value) {
        out.value = up;
        out.residual = res;
        out.mono_coeffs = c;
      }
      double step = 0.5 * up / (row_norm * std::sqrt(double(t)));
      Eigen::VectorXcd dir = phi.row(mi).adjoint() * (res(mi) / up);
      c += step * dir;
      res = b - phi * c;
    }
  }
  if (out.residual.size() == n) {
    for (int i = 0; i < n; ++i)
      if (std::abs(out.residual(i)) >= out.value * (1.0 - 1e-6))
        out.active.push_back(i);
  }
  return out;
}

// Discrete Remez exchange for real point sets: the weighted monic problem
// min max |h^k (x^k - q(x))|, deg q < k, has a Haar structure, so the
// optimum equioscillates on k+1 reference points. The inner solve runs in
// a Chebyshev basis to keep the alternant system well conditioned.
struct RemezOut {
  bool ok = false;
  double value = 0.0;
  int iterations = 0;
  Eigen::VectorXd mono_coeffs;  // q in monomials; residual = h^k (x^k - q)
  std::vector<int> reference;
};

RemezOut remez_real(const std::vector<double>& xs, const std::vector<double>& hk,
                    int k, int max_iter = 60) {
  RemezOut out;
  const int n = int(xs.size());
  if (n < k + 1) return out;
  double lo = xs.front(), hi = xs.back();
  for (double x : xs) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  if (hi <= lo) return out;
  auto t_at = [&](int j, double x) {
    double u = (2.0 * x - (lo + hi)) / (hi - lo);
    return std::cos(j * std::acos(std::clamp(u, -1.0, 1.0)));
  };
  // Reference: k+1 spread indices (the grid is monotone in x).
  std::vector<int> ref(std::size_t(k) + 1);
  for (int j = 0; j <= k; ++j) ref[std::size_t(j)] = int(std::llround(double(j) * (n - 1) / double(k)));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(k);
  std::vector<double> resid(xs.size(), 0.0);
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    Eigen::MatrixXd a(k + 1, k + 1);
    Eigen::VectorXd rhs(k + 1);
    for (int i = 0; i <= k; ++i) {
      double x = xs[std::size_t(ref[std::size_t(i)])];
      double w = hk[std::size_t(ref[std::size_t(i)])];
      for (int j = 0; j < k; ++j) a(i, j) = w * t_at(j, x);
      a(i, k) = (i % 2 == 0) ? 1.0 : -1.0;
      rhs(i) = w * std::pow(x, k);
    }
    Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
    c = sol.head(k);
    double level = std::fabs(sol(k));
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      double q = 0.0;
      for (int j = 0; j < k; ++j) q += c(j) * t_at(j, xs[std::size_t(i)]);
      resid[std::size_t(i)] =
          hk[std::size_t(i)] * (std::pow(xs[std::size_t(i)], k) - q);
      worst = std::max(worst, std::fabs(resid[std::size_t(i)]));
    }
    if (worst <= level * (1.0 + 1e-9) || (worst - level) <= 1e-14) {
      out.ok = true;
      out.value = worst;
      break;
    }
    // Multi-exchange: per sign run keep the largest |r|, then trim the
    // alternating candidate list to k+1 keeping the global maximum.
    std::vector<int> cand;
    int run_best = 0;
    for (int i = 1; i <= n; ++i) {
      bool flip = (i == n) || ((resid[std::size_t(i)] >= 0) != (resid[std::size_t(run_best)] >= 0));
      if (flip) {
        cand.push_back(run_best);
        if (i < n) run_best = i;
      } else if (std::fabs(resid[std::size_t(i)]) > std::fabs(resid[std::size_t(run_best)])) {
        run_best = i;
      }
    }
    if (int(cand.size()) < k + 1) return out;  // alternation lost
    int global = cand[0];
    for (int i : cand)
      if (std::fabs(resid[std::size_t(i)]) > std::fabs(resid[std::size_t(global)])) global = i;
    while (int(cand.size()) > k + 1) {
      // Drop the weakest endpoint or interior pair, never the global max.
      auto weight = [&](std::size_t idx) {
        return (cand[idx] == global) ? std::numeric_limits<double>::infinity()
                                     : std::fabs(resid[std::size_t(cand[idx])]);
      };
      if (int(cand.size()) == k + 2) {
        if (weight(0) <= weight(cand.size() - 1))
          cand.erase(cand.begin());
        else
          cand.pop_back();
      } else {
        std::size_t drop = 0;
        double best_w = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cand.size(); ++i) {
          double w2 = weight(i) + weight(i + 1);
          if (w2 < best_w) {
            best_w = w2;
            drop = i;
          }
        }
        cand.erase(cand.begin() + long(drop), cand.begin() + long(drop) + 2);
      }
    }
    ref = cand;
  }
  if (!out.ok) return out;
  out.reference = ref;
  // Expand q = sum c_j T_j(affine(x)) into monomials.
  double alpha = 2.0 / (hi - lo), beta = -(lo + hi) / (hi - lo);
  std::vector<std::vector<double>> cheb{{1.0}, {beta, alpha}};
  for (int j = 2; j < std::max(k, 2); ++j) {
    const auto& t1 = cheb[std::size_t(j - 1)];
    const auto& t2 = cheb[std::size_t(j - 2)];
    std::vector<double> t(std::size_t(j) + 1, 0.0);
    for (std::size_t d = 0; d < t1.size(); ++d) {
      t[d] += 2.0 * beta * t1[d];
      t[d + 1] += 2.0 * alpha * t1[d];
    }
    for (std::size_t d = 0; d < t2.size(); ++d) t[d] -= t2[d];
    cheb.push_back(t);
  }
  out.mono_coeffs = Eigen::VectorXd::Zero(k);
  for (int j = 0; j < k; ++j)
    for (std::size_t d = 0; d < cheb[std::size_t(j)].size(); ++d)
      out.mono_coeffs(long(d)) += c(j) * cheb[std::size_t(j)][d];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Compact sets
// ---------------------------------------------------------------------------

CompactSet CompactSet::interval(double a, double b) {
  CompactSet s;
  s.kind = Kind::kInterval;
  s.a = a;
  s.b = b;
  return s;
}
CompactSet CompactSet::circle(double r) {
  CompactSet s;
  s.kind = Kind::kCircle;
  s.r = r;
  return s;
}
CompactSet CompactSet::disc(double r) {
  CompactSet s;
  s.kind = Kind::kDisc;
  s.r = r;
  return s;
}
CompactSet CompactSet::cloud_set(std::vector<Complex> pts) {
  CompactSet s;
  s.kind = Kind::kCloud;
  s.cloud = std::move(pts);
  if (s.cloud.empty()) throw std::invalid_argument("compact set: empty cloud");
  auto sorted = s.cloud;
  std::sort(sorted.begin(), sorted.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  for (std::size_t i = 1; i < sorted.size(); ++i)
    if (sorted[i] == sorted[i - 1])
      throw std::invalid_argument("compact set: cloud points must be distinct");
  return s;
}

CompactSet CompactSet::from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "interval")
    return interval(j.at("a").get<double>(), j.at("b").get<double>());
  if (kind == "circle") return circle(j.at("r").get<double>());
  if (kind == "disc") return disc(j.at("r").get<double>());
  if (kind == "cloud") {
    std::vector<Complex> pts;
    for (const auto& row : j.at("points"))
      pts.push_back({row.at(0).get<double>(), row.at(1).get<double>()});
    return cloud_set(std::move(pts));
  }
  throw std::invalid_argument("compact set JSON: unknown kind '" + kind + "'");
}

std::string CompactSet::to_json() const {
  nlohmann::ordered_json j;
  switch (kind) {
    case Kind::kInterval:
      j = {{"kind", "interval"}, {"a", a}, {"b", b}};
      break;
    case Kind::kCircle:
      j = {{"kind", "circle"}, {"r", r}};
      break;
    case Kind::kDisc:
      j = {{"kind", "disc"}, {"r", r}};
      break;
    case Kind::kCloud: {
      j["kind"] = "cloud";
      auto rows = nlohmann::ordered_json::array();
      for (const auto& z : cloud) rows.push_back({z.real(), z.imag()});
      j["points"] = rows;
      break;
    }
  }
  return j.dump();
}

std::vector<Complex> CompactSet::discretize(int points) const {
  std::vector<Complex> out;
  switch (kind) {
    case Kind::kInterval: {
      // Chebyshev-Lobatto nodes cluster where the contacts live.
      double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      for (int i = 0; i < points; ++i)
        out.push_back(mid + half * std::cos(M_PI * i / (points - 1)));
      break;
    }
    case Kind::kCircle:
    case Kind::kDisc:
      for (int i = 0; i < points; ++i)
        out.push_back(std::polar(r, 2.0 * M_PI * i / points));
      break;
    case Kind::kCloud:
      out = cloud;
      break;
  }
  return out;
}

std::string CompactSet::descriptor() const {
  switch (kind) {
    case Kind::kInterval: return "interval";
    case Kind::kCircle: return "circle";
    case Kind::kDisc: return "disc";
    case Kind::kCloud: return "cloud";
  }
  return "?";
}

Complex MonicPolynomial::eval(Complex z) const {
  Complex v = 1.0;  // leading coefficient
  for (int j = degree - 1; j >= 0; --j) v = v * z + coeffs[std::size_t(j)];
  return v;
}

AdmissibleWeight AdmissibleWeight::one() {
  return {[](Complex) { return 1.0; }, "unit"};
}

// ---------------------------------------------------------------------------
// Chebyshev numbers and constants
// ---------------------------------------------------------------------------

namespace {

MinimaxResult solve_at(const CompactSet& set, int k, const AdmissibleWeight& h,
                       int points) {
  auto zs = set.discretize(points);
  const int n = int(zs.size());
  bool real_data = true;
  for (const auto& z : zs)
    if (std::fabs(z.imag()) > 1e-14) real_data = false;
  if (real_data) {
    // Real point sets keep the real optimum; run the alternant exchange.
    std::vector<std::pair<double, double>> pts;  // (x, h^k)
    for (const auto& z : zs) {
      double hk = std::pow(h.h(z), k);
      if (!(hk > 0))
        throw std::invalid_argument("chebyshev_number: weight must be positive on K");
      pts.push_back({z.real(), hk});
    }
    std::sort(pts.begin(), pts.end());
    std::vector<double> xs, hk;
    for (const auto& [x, w] : pts) {
      xs.push_back(x);
      hk.push_back(w);
    }
    auto rem = remez_real(xs, hk, k);
    if (rem.ok) {
      MinimaxResult out;
      out.value = rem.value;
      out.converged = true;
      out.iterations = rem.iterations;
      out.poly.degree = k;
      out.poly.coeffs.resize(std::size_t(k));
      for (int j = 0; j < k; ++j)
        out.poly.coeffs[std::size_t(j)] = -rem.mono_coeffs(j);
      for (int idx : rem.reference) out.contacts.push_back(xs[std::size_t(idx)]);
      return out;
    }
  }
  Eigen::MatrixXcd phi(n, k);
  Eigen::VectorXcd b(n);
  for (int i = 0; i < n; ++i) {
    double hk = std::pow(h.h(zs[std::size_t(i)]), k);
    if (!(hk > 0))
      throw std::invalid_argument("chebyshev_number: weight must be positive on K");
    Complex p = hk;
    for (int j = 0; j < k; ++j) {
      phi(i, j) = p;
      p *= zs[std::size_t(i)];
    }
    b(i) = p;  // h^k z^k
  }
  auto law = lawson_minimax(phi, b);
  MinimaxResult out;
  out.value = law.value;
  out.converged = law.converged;
  out.iterations = law.iterations;
  out.poly.degree = k;
  out.poly.coeffs.resize(std::size_t(k));
  for (int j = 0; j < k; ++j) out.poly.coeffs[std::size_t(j)] = -law.mono_coeffs(j);
  for (int idx : law.active) out.contacts.push_back(zs[std::size_t(idx)]);
  return out;
}

}  // namespace

MinimaxResult chebyshev_number(const CompactSet& set, int k,
                               const AdmissibleWeight& h) {
  if (k == 0) {
    MinimaxResult out;
    out.value = out.value_coarse = 1.0;
    out.converged = out.refinement_stable = true;
    out.poly.degree = 0;
    return out;
  }
  int base = std::max(4 * k, 64);
  if (set.kind == CompactSet::Kind::kCloud) base = int(set.cloud.size());
  MinimaxResult coarse = solve_at(set, k, h, base);
  if (set.kind == CompactSet::Kind::kCloud) {
    coarse.value_coarse = coarse.value;
    coarse.refinement_stable = true;
    return coarse;
  }
  // Nested refinement: Lobatto grids need 2M-1 nodes to contain the M-node
  // grid, uniform circle grids need 2M.
  int refined = (set.kind == CompactSet::Kind::kInterval) ? 2 * base - 1 : 2 * base;
  MinimaxResult fine = solve_at(set, k, h, refined);
  fine.value_coarse = coarse.value;
  double scale = std::max({fine.value, coarse.value, 1e-300});
  fine.refinement_stable = std::fabs(fine.value - coarse.value) <= 1e-3 * scale;
  return fine;
}

std::string LadderFit::to_csv(const std::string& value_name) const {
  std::string s = "k," + value_name + ",root,extrapolant\n";
  char buf[160];
  for (std::size_t i = 0; i < ks.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%lld,%.12g,%.12g,%.12g\n",
                  static_cast<long long>(ks[i]), raw[i], roots[i], fitted);
    s += buf;
  }
  return s;
}

LadderFit chebyshev_constant(const CompactSet& set, const AdmissibleWeight& h,
                             int k_max) {
  LadderFit out;
  for (int k = 1; k <= k_max; ++k) {
    auto res = chebyshev_number(set, k, h);
    if (!res.converged && !res.refinement_stable) out.warned = true;
    out.ks.push_back(k);
    out.raw.push_back(res.value);
    out.roots.push_back(std::pow(res.value, 1.0 / k));
  }
  out.last = out.roots.back();
  // Fit ln(Y_k)/k = ln C + b/k on the ladder tail.
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.ks.size(); ++i)
    if (out.ks[i] >= std::max(2, k_max / 2)) {
      xs.push_back(double(out.ks[i]));
      ys.push_back(std::log(out.raw[i]) / double(out.ks[i]));
    }
  auto c = lsq_fit(xs, ys,
                   {[](double) { return 1.0; }, [](double k) { return 1.0 / k; }});
  out.fitted = std::exp(c[0]);
  return out;
}

// ---------------------------------------------------------------------------
// Leja / Fekete and the transfinite diameter
// ---------------------------------------------------------------------------

namespace {

double log_product_to_others(const std::vector<Complex>& pts, Complex z,
                             int skip = -1) {
  double s = 0.0;
  for (int j = 0; j < int(pts.size()); ++j) {
    if (j == skip) continue;
    double d = std::abs(z - pts[std::size_t(j)]);
    if (d == 0.0) return -std::numeric_limits<double>::infinity();
    s += std::log(d);
  }
  return s;
}

double log_vandermonde(const std::vector<Complex>& pts) {
  double s = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      double d = std::abs(pts[i] - pts[j]);
      if (d == 0.0) return -std::numeric_limits<double>::infinity();
      s += std::log(d);
    }
  return s;
}

}  // namespace

LejaResult leja_fekete(const CompactSet& set, int k) {
  if (k < 2) throw std::invalid_argument("leja_fekete: k must be >= 2");
  int base = std::max(8 * k, 128);
  if (set.kind == CompactSet::Kind::kCloud) base = int(set.cloud.size());
  auto grid = set.discretize(base);
  LejaResult out;
  std::vector<Complex> distinct = grid;
  std::sort(distinct.begin(), distinct.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (int(distinct.size()) < k) {
    out.degenerate = true;
    out.log_dk = out.log_dk_greedy = -std::numeric_limits<double>::infinity();
    return out;
  }
  // Greedy Leja: start at the max-modulus point, then argmax of the
  // log-product to the chosen points.
  std::size_t first = 0;
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (std::abs(grid[i]) > std::abs(grid[first])) first = i;
  out.points.push_back(grid[first]);
  while (int(out.points.size()) < k) {
    std::size_t best = 0;
    double best_v = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double v = log_product_to_others(out.points, grid[i]);
      if (v > best_v) {
        best_v = v;
        best = i;
      }
    }
    out.points.push_back(grid[best]);
  }
  out.log_dk_greedy = log_vandermonde(out.points);
  // Coordinate-wise polish: move each point to the grid argmax of the
  // product objective until a fixed point.
  for (int round = 0; round < 50; ++round) {
    bool moved = false;
    for (int i = 0; i < k; ++i) {
      double cur = log_product_to_others(out.points, out.points[std::size_t(i)], i);
      std::size_t best = grid.size();
      double best_v = cur;
      for (std::size_t t = 0; t < grid.size(); ++t) {
        double v = log_product_to_others(out.points, grid[t], i);
        if (v > best_v + 1e-14) {
          best_v = v;
          best = t;
        }
      }
      if (best < grid.size()) {
        out.points[std::size_t(i)] = grid[best];
        moved = true;
      }
    }
    if (!moved) break;
  }
  out.log_dk = log_vandermonde(out.points);
  return out;
}

LadderFit transfinite_diameter(const CompactSet& set, int k_max) {
  LadderFit out;
  for (int k = 2; k <= k_max; ++k) {
    auto res = leja_fekete(set, k);
    if (res.degenerate) {
      out.warned = true;
      break;
    }
    out.ks.push_back(k);
    out.raw.push_back(res.log_dk);
    out.roots.push_back(std::exp(res.log_dk / (0.5 * k * (k - 1))));
  }
  if (out.ks.empty()) return out;
  out.last = out.roots.back();
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.ks.size(); ++i)
    if (out.ks[i] >= std::max<std::int64_t>(5, k_max / 2)) {
      xs.push_back(double(out.ks[i]));
      ys.push_back(std::log(out.roots[i]));
    }
  if (xs.size() >= 3) {
    auto c = lsq_fit(xs, ys,
                     {[](double) { return 1.0; },
                      [](double k) { return std::log(k) / k; },
                      [](double k) { return 1.0 / k; }});
    out.fitted = std::exp(c[0]);
  } else {
    out.fitted = out.last;
  }
  return out;
}

FieldP1Result chebyshev_field_p1(const CompactSet& set, int k_max, int cells) {
  FieldP1Result out;
  std::vector<double> ln_y(std::size_t(k_max) + 1, 0.0);
  for (int j = 1; j <= k_max; ++j)
    ln_y[std::size_t(j)] = std::log(chebyshev_number(set, j).value);
  ConvexBody body = ConvexBody::interval(0.0, 1.0);
  // Data-resolution grid: margin 2 cells keeps both Richardson levels off
  // the degree-0 kink of ln Y.
  if (cells <= 0) cells = k_max;
  ChebyshevField f = ChebyshevField::over_interior(body, cells, 2);
  int k1 = k_max;
  int k2 = std::max(2, k_max / 2);
  for (int i = 0; i < f.grid.counts[0]; ++i) {
    std::size_t idx = f.index(i);
    if (f.state[idx] != NodeState::kMissing) continue;
    double alpha = f.node_coord(i)[0];
    // ln Y interpolated between the adjacent lattice exponents, then one
    // Richardson step in 1/k to strip the leading correction.
    auto level_value = [&](int k) {
      double j_real = std::clamp(double(k) * (1.0 - alpha), 0.0, double(k));
      int j0 = std::min(int(j_real), k - 1);
      double t = j_real - j0;
      double ln_y_interp =
          (1.0 - t) * ln_y[std::size_t(j0)] + t * ln_y[std::size_t(j0) + 1];
      return 2.0 * ln_y_interp / double(k);
    };
    double v1 = level_value(k1), v2 = level_value(k2);
    f.values[idx] = (k1 * v1 - k2 * v2) / double(k1 - k2);
    f.state[idx] = NodeState::kPresent;
  }
  // field ~ slope * (1 - alpha).
  double num = 0.0, den = 0.0;
  for (int i = 0; i < f.grid.counts[0]; ++i) {
    std::size_t idx = f.index(i);
    if (f.state[idx] != NodeState::kPresent) continue;
    double one_minus = 1.0 - f.node_coord(i)[0];
    num += f.values[idx] * one_minus;
    den += one_minus * one_minus;
  }
  out.fitted_slope = (den > 0) ? num / den : 0.0;
  out.field = std::move(f);
  return out;
}

// ---------------------------------------------------------------------------
// Directional Chebyshev constants in C^2
// ---------------------------------------------------------------------------

CompactSet2 CompactSet2::product(const CompactSet& k1, const CompactSet& k2,
                                 int per_axis) {
  CompactSet2 out;
  auto z1 = k1.discretize(per_axis);
  auto z2 = k2.discretize(per_axis);
  for (const auto& a : z1)
    for (const auto& b : z2) out.points.push_back({a, b});
  out.descriptor = k1.descriptor() + "x" + k2.descriptor();
  return out;
}

AdmissibleWeight2 AdmissibleWeight2::one() {
  return {[](const std::array<Complex, 2>&) { return 1.0; }, "unit"};
}

namespace {

bool graded_lex_less(const std::array<std::int64_t, 2>& a,
                     const std::array<std::int64_t, 2>& b) {
  auto sa = a[0] + a[1], sb = b[0] + b[1];
  if (sa != sb) return sa < sb;
  if (a[0] != b[0]) return a[0] < b[0];
  return a[1] < b[1];
}

}  // namespace

DirectionalResult directional_chebyshev(const CompactSet2& set,
                                        const AdmissibleWeight2& h,
                                        const std::array<double, 2>& theta,
                                        const std::vector<std::int64_t>& degrees) {
  if (!(theta[0] > 0 && theta[1] > 0 &&
        std::fabs(theta[0] + theta[1] - 1.0) < 1e-9))
    throw std::invalid_argument(
        "directional_chebyshev: theta must be strictly interior to the simplex");
  DirectionalResult out;
  const int n = int(set.points.size());
  for (std::int64_t deg : degrees) {
    std::array<std::int64_t, 2> alpha{std::llround(double(deg) * theta[0]), 0};
    alpha[0] = std::clamp<std::int64_t>(alpha[0], 1, deg - 1);
    alpha[1] = deg - alpha[0];
    // Basis: all beta strictly below alpha in the graded lexicographic
    // order ("lower order terms").
    std::vector<std::array<std::int64_t, 2>> basis;
    for (std::int64_t s = 0; s <= deg; ++s)
      for (std::int64_t b0 = 0; b0 <= s; ++b0) {
        std::array<std::int64_t, 2> beta{b0, s - b0};
        if (graded_lex_less(beta, alpha)) basis.push_back(beta);
      }
    Eigen::MatrixXcd phi(n, int(basis.size()));
    Eigen::VectorXcd rhs(n);
    for (int i = 0; i < n; ++i) {
      const auto& z = set.points[std::size_t(i)];
      double hd = std::pow(h.h(z), double(deg));
      for (std::size_t j = 0; j < basis.size(); ++j)
        phi(i, int(j)) = hd * std::pow(z[0], double(basis[j][0])) *
                         std::pow(z[1], double(basis[j][1]));
      rhs(i) = hd * std::pow(z[0], double(alpha[0])) *
               std::pow(z[1], double(alpha[1]));
    }
    auto law = lawson_minimax(phi, rhs, 1e-6, 1200);
    if (!law.converged) out.warned = true;
    out.degrees.push_back(deg);
    out.taus.push_back(std::pow(law.value, 1.0 / double(deg)));
  }
  // Extrapolate ln tau with a 1/deg correction.
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < out.degrees.size(); ++i) {
    xs.push_back(double(out.degrees[i]));
    ys.push_back(std::log(out.taus[i]));
  }
  if (xs.size() >= 2) {
    auto c = lsq_fit(xs, ys,
                     {[](double) { return 1.0; }, [](double d) { return 1.0 / d; }});
    out.extrapolated = std::exp(c[0]);
  } else if (!xs.empty()) {
    out.extrapolated = out.taus.back();
  }
  return out;
}

}  // namespace okb
