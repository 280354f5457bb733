#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <vector>

#include "nbp/analytics.hpp"
#include "nbp/rng.hpp"

using namespace nbp;

namespace {

constexpr int kDraws = 100000;

template <typename F>
double mean_of(int n, F&& draw) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += static_cast<double>(draw());
  return total / n;
}

template <typename F>
GofResult integer_gof(int n, F&& draw, const Pmf& pmf) {
  std::vector<std::uint64_t> values(n);
  for (auto& v : values) v = draw();
  return chi_square_gof(histogram(values), pmf, values.size(), 1e-3);
}

}  // namespace

TEST_CASE("uniform01 stays in range and is reproducible") {
  Rng a(42);
  Rng b(42);
  for (int i = 0; i < 1000; ++i) {
    const double u = a.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(u == b.uniform01());
  }
}

TEST_CASE("uniform01 mean is 1/2 within 4 sigma") {
  Rng rng(42);
  const double mean = mean_of(kDraws, [&] { return rng.uniform01(); });
  CHECK(std::fabs(mean - 0.5) < 4.0 / std::sqrt(12.0 * kDraws));
}

TEST_CASE("substreams are reproducible and distinct") {
  const Rng root(7);
  Rng a = root.substream("coins");
  Rng b = root.substream("coins");
  Rng c = root.substream("uniforms");
  Rng d = root.substream("coins", 1);
  CHECK(a.seed() == b.seed());
  CHECK(a.seed() != c.seed());
  CHECK(a.seed() != d.seed());
  CHECK(a.next_u64() == b.next_u64());
  CHECK(derive_seed(7, "coins") == root.substream("coins").seed());
  CHECK(Rng(8).substream("coins").seed() != a.seed());
}

TEST_CASE("bernoulli") {
  Rng rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK_FALSE(bernoulli(rng, 0.0));
    CHECK(bernoulli(rng, 1.0));
  }
  const double mean = mean_of(kDraws, [&] { return bernoulli(rng, 0.3) ? 1 : 0; });
  CHECK(std::fabs(mean - 0.3) < 4.0 * std::sqrt(0.21 / kDraws));
  CHECK_THROWS_AS(bernoulli(rng, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli(rng, 1.1), std::invalid_argument);
  CHECK_THROWS_AS(bernoulli(rng, std::nan("")), std::invalid_argument);
}

TEST_CASE("poisson moments and pmf") {
  Rng rng(2);
  CHECK(poisson(rng, 0.0) == 0);
  const double mean = mean_of(kDraws, [&] { return poisson(rng, 3.0); });
  CHECK(std::fabs(mean - 3.0) < 4.0 * std::sqrt(3.0 / kDraws));

  const double p0 = mean_of(kDraws, [&] { return poisson(rng, 0.5) == 0 ? 1 : 0; });
  const double e = std::exp(-0.5);
  CHECK(std::fabs(p0 - e) < 4.0 * std::sqrt(e * (1 - e) / kDraws));

  CHECK_THROWS_AS(poisson(rng, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(poisson(rng, INFINITY), std::invalid_argument);
  CHECK_THROWS_AS(poisson(rng, std::nan("")), std::invalid_argument);
}

TEST_CASE("poisson passes chi-square on both sides of the inversion cutoff") {
  for (double lambda : {0.7, 3.0, 10.0, 10.5, 37.0}) {
    CAPTURE(lambda);
    Rng rng(derive_seed(3, "poisson", static_cast<std::uint64_t>(lambda * 10)));
    const boost::math::poisson_distribution<> law(lambda);
    const auto gof = integer_gof(kDraws, [&] { return poisson(rng, lambda); },
                                 [&](std::uint64_t k) { return boost::math::pdf(law, static_cast<double>(k)); });
    CHECK(gof.p_value > 1e-3);
  }
}

TEST_CASE("gamma moments, tail and parameter checks") {
  Rng rng(4);
  const double tail = mean_of(kDraws, [&] { return gamma(rng, 1.0, 2.0) > 2.0 ? 1 : 0; });
  const double e = std::exp(-1.0);
  CHECK(std::fabs(tail - e) < 4.0 * std::sqrt(e * (1 - e) / kDraws));

  const double mean = mean_of(kDraws, [&] { return gamma(rng, 2.0, 1.0); });
  CHECK(std::fabs(mean - 2.0) < 4.0 * std::sqrt(2.0 / kDraws));

  const double small = mean_of(kDraws, [&] { return gamma(rng, 0.3, 1.0); });
  CHECK(std::fabs(small - 0.3) < 4.0 * std::sqrt(0.3 / kDraws));

  CHECK_THROWS_AS(gamma(rng, 0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma(rng, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(gamma(rng, -1.0, 1.0), std::invalid_argument);
}

TEST_CASE("gamma passes chi-square on equiprobable bins") {
  for (double shape : {0.4, 1.0, 2.5, 9.0}) {
    CAPTURE(shape);
    Rng rng(derive_seed(5, "gamma", static_cast<std::uint64_t>(shape * 10)));
    const boost::math::gamma_distribution<> law(shape, 1.5);
    constexpr int bins = 20;
    std::vector<std::uint64_t> bin_of(kDraws);
    for (auto& b : bin_of) {
      const double u = boost::math::cdf(law, gamma(rng, shape, 1.5));
      b = std::min<std::uint64_t>(bins - 1, static_cast<std::uint64_t>(u * bins));
    }
    const auto gof = chi_square_gof(histogram(bin_of),
                                    [](std::uint64_t k) { return k < bins ? 1.0 / bins : 0.0; },
                                    kDraws, 1e-3);
    CHECK(gof.degrees_of_freedom == bins - 1);
    CHECK(gof.p_value > 1e-3);
  }
}

TEST_CASE("negbin_oracle matches NB(r, p)") {
  Rng rng(6);
  const double mean = mean_of(kDraws, [&] { return negbin_oracle(rng, 2.0, 0.5); });
  // Var NB(2, 0.5) = r p / (1-p)^2 = 4.
  CHECK(std::fabs(mean - 2.0) < 4.0 * std::sqrt(4.0 / kDraws));

  const double p0 = mean_of(kDraws, [&] { return negbin_oracle(rng, 1.0, 0.5) == 0 ? 1 : 0; });
  CHECK(std::fabs(p0 - 0.5) < 4.0 * std::sqrt(0.25 / kDraws));

  for (auto [r, p] : {std::pair{2.0, 0.3}, std::pair{2.5, 0.3}, std::pair{0.5, 0.8}}) {
    CAPTURE(r);
    CAPTURE(p);
    // boost counts failures before r successes with success probability 1-p.
    const boost::math::negative_binomial_distribution<> law(r, 1.0 - p);
    const auto gof = integer_gof(kDraws, [&] { return negbin_oracle(rng, r, p); },
                                 [&](std::uint64_t k) { return boost::math::pdf(law, static_cast<double>(k)); });
    CHECK(gof.p_value > 1e-3);
  }

  CHECK_THROWS_AS(negbin_oracle(rng, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(negbin_oracle(rng, 1.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(negbin_oracle(rng, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("every sampler is a function of the seed") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> out;
    for (int i = 0; i < 200; ++i) {
      out.push_back(rng.uniform01());
      out.push_back(bernoulli(rng, 0.4));
      out.push_back(static_cast<double>(poisson(rng, 2.0)));
      out.push_back(static_cast<double>(poisson(rng, 40.0)));
      out.push_back(gamma(rng, 0.7, 1.0));
      out.push_back(static_cast<double>(negbin_oracle(rng, 1.5, 0.6)));
    }
    return out;
  };
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL, 0xFFFFFFFFFFFFFFFFULL}) {
    CHECK(run(seed) == run(seed));
  }
  CHECK(run(1) != run(2));
}
