#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace okb {

inline constexpr const char* kVersion = "0.1.0";

// FNV-1a, used for config hashes embedded in reports.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v);

// Maximize a unimodal function on [a,b] by golden-section search.
// Returns the maximizing x; tol is on the bracket width.
double golden_max(const std::function<double(double)>& f, double a, double b,
                  double tol = 1e-9, int max_iter = 200);

// Maximize f on [a,b]: coarse scan with n nodes, then golden polish
// around the best node. Deterministic.
struct MaxResult {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};
MaxResult scan_max(const std::function<double(double)>& f, double a, double b,
                   int n_scan = 257, double tol = 1e-10);

// log(sum(exp(a_i))) without overflow; empty input -> -inf.
double log_sum_exp(const std::vector<double>& a);

// Streaming logsumexp accumulator.
class LogSumExp {
 public:
  void add(double a) {
    if (a == -std::numeric_limits<double>::infinity()) return;
    if (a > max_) {
      if (sum_ > 0.0) sum_ *= std::exp(max_ - a);
      max_ = a;
    }
    sum_ += std::exp(a - max_);
  }
  double value() const {
    if (sum_ == 0.0) return -std::numeric_limits<double>::infinity();
    return max_ + std::log(sum_);
  }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double sum_ = 0.0;
};

// Least-squares fit of y ~ sum_j c_j * basis_j(x). Returns coefficients.
std::vector<double> lsq_fit(const std::vector<double>& x,
                            const std::vector<double>& y,
                            const std::vector<std::function<double(double)>>& basis);

// ln binomial(n, k) via lgamma.
inline double ln_binomial(long long n, long long k) {
  if (k < 0 || k > n) throw std::invalid_argument("ln_binomial: k out of range");
  return std::lgamma(double(n) + 1.0) - std::lgamma(double(k) + 1.0) -
         std::lgamma(double(n - k) + 1.0);
}

inline double sqr(double x) { return x * x; }

// Deterministic xorshift generator for seeded property tests and probes.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  // Uniform in [0,1).
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

}  // namespace okb
