#include "nbp/rng.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace nbp {

namespace {

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

std::uint64_t poisson_inversion(Rng& rng, double lambda) {
  // Sequential search; exp(-10) is far from underflow.
  const double u = rng.uniform01();
  double p = std::exp(-lambda);
  double cdf = p;
  std::uint64_t k = 0;
  while (u >= cdf) {
    ++k;
    p *= lambda / static_cast<double>(k);
    cdf += p;
    if (p <= 0.0) break;  // numerically exhausted tail
  }
  return k;
}

// Hormann (1993), "The transformed rejection method for generating Poisson
// random variables", algorithm PTRS. Valid for lambda >= 10.
std::uint64_t poisson_ptrs(Rng& rng, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double vr = 0.9277 - 3.6224 / (b - 2.0);
  for (;;) {
    const double u = rng.uniform01() - 0.5;
    const double v = rng.uniform01();
    const double us = 0.5 - std::fabs(u);
    const double k = std::floor((2.0 * a / us + b) * u + lambda + 0.43);
    if (us >= 0.07 && v <= vr) return static_cast<std::uint64_t>(k);
    if (k < 0.0 || (us < 0.013 && v > us)) continue;
    const double lhs = std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b);
    const double rhs = -lambda + k * loglam - std::lgamma(k + 1.0);
    if (lhs <= rhs) return static_cast<std::uint64_t>(k);
  }
}

double standard_normal(Rng& rng) {
  // Marsaglia polar method; the spare variate is discarded to keep the
  // state transition a function of the call sequence only.
  for (;;) {
    const double x = 2.0 * rng.uniform01() - 1.0;
    const double y = 2.0 * rng.uniform01() - 1.0;
    const double s = x * x + y * y;
    if (s > 0.0 && s < 1.0) return x * std::sqrt(-2.0 * std::log(s) / s);
  }
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(seed) {
  std::uint64_t x = seed;
  for (auto& word : s_) {
    x += 0x9E3779B97F4A7C15ULL;
    word = mix64(x);
  }
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = rotl(s_[3], 45);
  return result;
}

bool bernoulli(Rng& rng, double p) {
  require(p >= 0.0 && p <= 1.0, "bernoulli: p must lie in [0, 1]");
  return rng.uniform01() < p;
}

std::uint64_t poisson(Rng& rng, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0,
          "poisson: lambda must be finite and non-negative");
  if (lambda == 0.0) return 0;
  if (lambda <= 10.0) return poisson_inversion(rng, lambda);
  return poisson_ptrs(rng, lambda);
}

double gamma(Rng& rng, double shape, double scale) {
  require(std::isfinite(shape) && shape > 0.0, "gamma: shape must be positive");
  require(std::isfinite(scale) && scale > 0.0, "gamma: scale must be positive");
  if (shape < 1.0) {
    const double g = gamma(rng, shape + 1.0, scale);
    double u = rng.uniform01();
    while (u == 0.0) u = rng.uniform01();
    return g * std::pow(u, 1.0 / shape);
  }
  // Marsaglia & Tsang (2000).
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform01();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v * scale;
    if (u > 0.0 && std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v * scale;
  }
}

std::uint64_t negbin_oracle(Rng& rng, double r, double p) {
  require(std::isfinite(r) && r > 0.0, "negbin_oracle: r must be positive");
  require(p > 0.0 && p < 1.0, "negbin_oracle: p must lie in (0, 1)");
  return poisson(rng, gamma(rng, r, p / (1.0 - p)));
}

}  // namespace nbp
