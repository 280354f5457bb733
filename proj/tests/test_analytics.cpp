#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <boost/math/distributions/negative_binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "nbp/analytics.hpp"

using namespace nbp;

TEST_CASE("nb_pmf worked values") {
  CHECK(nb_pmf(0, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(nb_pmf(2, 2.0, 0.5) == doctest::Approx(0.1875).epsilon(1e-14));
  CHECK(std::exp(nb_log_pmf(3, 2.5, 0.3)) == doctest::Approx(nb_pmf(3, 2.5, 0.3)));
  CHECK_THROWS_AS(nb_pmf(0, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(nb_pmf(0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(nb_pmf(0, 1.0, 1.0), std::invalid_argument);
}

TEST_CASE("nb_pmf agrees with boost, sums to one and has mean rp/(1-p)") {
  for (double r : {0.5, 1.0, 2.5, 3.0}) {
    for (double p : {0.2, 0.5, 0.8}) {
      CAPTURE(r);
      CAPTURE(p);
      const boost::math::negative_binomial_distribution<> law(r, 1.0 - p);
      double total = 0.0;
      double mean = 0.0;
      for (std::uint64_t k = 0; k < 2000; ++k) {
        const double q = nb_pmf(k, r, p);
        if (k < 50) CHECK(q == doctest::Approx(boost::math::pdf(law, static_cast<double>(k))).epsilon(1e-10));
        total += q;
        mean += static_cast<double>(k) * q;
      }
      CHECK(std::fabs(total - 1.0) < 1e-9);
      CHECK(std::fabs(mean - r * p / (1.0 - p)) < 1e-9);
    }
  }
}

TEST_CASE("poisson_pmf") {
  CHECK(poisson_pmf(0, 0.0) == 1.0);
  CHECK(poisson_pmf(1, 0.0) == 0.0);
  CHECK(poisson_pmf(2, 3.0) == doctest::Approx(4.5 * std::exp(-3.0)).epsilon(1e-14));
}

TEST_CASE("mixture pmf") {
  const std::vector<MixtureComponent> mix{{0.5, 0.2}, {0.5, 0.6}};
  CHECK(mixture_nb_pmf(0, 1.0, mix) == doctest::Approx(0.6).epsilon(1e-14));
  const std::vector<MixtureComponent> swapped{{0.5, 0.6}, {0.5, 0.2}};
  const std::vector<MixtureComponent> single{{1.0, 0.3}};
  for (std::uint64_t k = 0; k < 30; ++k) {
    CHECK(mixture_nb_pmf(k, 2.0, mix) == doctest::Approx(mixture_nb_pmf(k, 2.0, swapped)));
    CHECK(mixture_nb_pmf(k, 2.5, single) == doctest::Approx(nb_pmf(k, 2.5, 0.3)));
  }
  const std::vector<MixtureComponent> bad{{0.5, 0.2}, {0.4, 0.6}};
  CHECK_THROWS_AS(mixture_nb_pmf(0, 1.0, bad), std::invalid_argument);
}

TEST_CASE("regularized incomplete gamma matches boost") {
  for (double a : {0.5, 1.0, 2.5, 10.0, 49.5}) {
    for (double x : {0.0, 0.1, 1.0, 3.0, 11.0, 60.0, 200.0}) {
      CAPTURE(a);
      CAPTURE(x);
      CHECK(regularized_gamma_q(a, x) == doctest::Approx(boost::math::gamma_q(a, x)).epsilon(1e-10));
      CHECK(regularized_gamma_p(a, x) == doctest::Approx(boost::math::gamma_p(a, x)).epsilon(1e-10));
    }
  }
  CHECK(chi_square_sf(0.0, 3) == 1.0);
  CHECK(chi_square_sf(2.0, 2) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("chi-square GOF on exact proportions") {
  const auto pmf = [](std::uint64_t k) { return nb_pmf(k, 2.0, 0.3); };
  std::vector<std::uint64_t> observed;
  std::uint64_t n = 0;
  // Counts proportional to a pmf on a finite support give statistic 0.
  const auto uniform = [](std::uint64_t k) { return k < 4 ? 0.25 : 0.0; };
  observed = {100, 100, 100, 100};
  n = 400;
  const auto exact = chi_square_gof(observed, uniform, n);
  CHECK(exact.statistic == doctest::Approx(0.0));
  CHECK(exact.p_value == doctest::Approx(1.0));
  CHECK(exact.degrees_of_freedom == 3);
  CHECK(exact.passed());

  // Every bin keeps expected count >= 5.
  std::vector<std::uint64_t> sample(3000);
  Rng rng(1);
  for (auto& v : sample) v = negbin_oracle(rng, 2.0, 0.3);
  const auto gof = chi_square_gof(histogram(sample), pmf, sample.size());
  double expected_total = 0.0;
  double observed_total = 0.0;
  for (const auto& bin : gof.bins) {
    CHECK(bin.expected >= kMinExpectedPerBin);
    expected_total += bin.expected;
    observed_total += bin.observed;
  }
  CHECK(expected_total == doctest::Approx(3000.0));
  CHECK(observed_total == 3000.0);
  CHECK(gof.degrees_of_freedom + 1 == gof.bins.size());
  CHECK(gof.p_value > 1e-3);

  CHECK_THROWS_AS(chi_square_gof(std::vector<std::uint64_t>{3}, pmf, 3), InsufficientBins);
  CHECK_THROWS_AS(chi_square_gof(std::vector<std::uint64_t>{3, 4}, pmf, 8), std::invalid_argument);
}

TEST_CASE("chi-square GOF rejects a wrong law") {
  std::vector<std::uint64_t> sample(5000);
  Rng rng(2);
  for (auto& v : sample) v = negbin_oracle(rng, 2.0, 0.3);
  const auto gof = chi_square_gof(histogram(sample), [](std::uint64_t k) { return nb_pmf(k, 2.0, 0.4); },
                                  sample.size());
  CHECK_FALSE(gof.passed());
}

TEST_CASE("chi-square p-values are roughly uniform under the null") {
  Rng rng(3);
  std::vector<double> p_values;
  for (int rep = 0; rep < 100; ++rep) {
    std::vector<std::uint64_t> sample(2000);
    for (auto& v : sample) v = negbin_oracle(rng, 1.5, 0.5);
    p_values.push_back(chi_square_gof(histogram(sample), [](std::uint64_t k) { return nb_pmf(k, 1.5, 0.5); },
                                      sample.size())
                           .p_value);
  }
  std::sort(p_values.begin(), p_values.end());
  double ks = 0.0;
  for (std::size_t i = 0; i < p_values.size(); ++i) {
    const double lo = static_cast<double>(i) / p_values.size();
    const double hi = static_cast<double>(i + 1) / p_values.size();
    ks = std::max({ks, std::fabs(p_values[i] - lo), std::fabs(p_values[i] - hi)});
  }
  CHECK(ks < 0.2);
}

TEST_CASE("sample moments") {
  const std::vector<double> xs{1, 2, 3, 4};
  const std::vector<double> ys{2, 4, 6, 8};
  CHECK(sample_mean(xs) == 2.5);
  CHECK(sample_variance(xs) == doctest::Approx(5.0 / 3.0));
  CHECK(sample_covariance(xs, ys) == doctest::Approx(10.0 / 3.0));
  CHECK(histogram(std::vector<std::uint64_t>{0, 2, 2}) == std::vector<std::uint64_t>{1, 0, 2});

  Rng rng(4);
  std::vector<double> a(2000);
  std::vector<double> b(2000);
  for (std::size_t i = 0; i < a.size(); ++i) {
    a[i] = rng.uniform01();
    b[i] = a[i] + rng.uniform01();
  }
  // Cov(a, a + u) = Var(a) = 1/12.
  const double se = bootstrap_covariance_se(a, b, 200, rng);
  CHECK(se > 0.0);
  CHECK(se < 0.01);
  CHECK(std::fabs(sample_covariance(a, b) - 1.0 / 12.0) < 4.0 * se);
}

TEST_CASE("Monte-Carlo Laplace check") {
  const auto empty = [] { return MultisetPointProcess{}; };
  const auto zero = StepFunction::constant(0.0);
  CHECK(mc_laplace_check(empty, zero, 1.0, 100).z == 0.0);
  CHECK(mc_laplace_check(empty, zero, 1.0, 100).passed());
  const auto one = StepFunction::constant(1.0);
  CHECK_FALSE(mc_laplace_check(empty, one, 0.5, 100).passed());

  Rng rng(5);
  const auto single = [&] {
    const auto k = negbin_oracle(rng, 2.0, 0.5);
    if (k == 0) return MultisetPointProcess{};
    return MultisetPointProcess({{Location{0.5}, k}});
  };
  // E exp(-X) for X ~ NB(2, 0.5): ((1-p)/(1-p e^-1))^2.
  const double target = std::pow(0.5 / (1.0 - 0.5 * std::exp(-1.0)), 2.0);
  const auto check = mc_laplace_check(single, one, target, 20000);
  CHECK(check.samples == 20000);
  CHECK(check.passed());
}

TEST_CASE("appendix properties") {
  Rng rng(6);
  const std::vector<double> r_list{1.5, 2.0};
  CHECK(test_sum_property(r_list, 0.4, 20000, rng).passed());
  CHECK(test_successes_before_failures(3, 0.3, 20000, rng).passed());
  CHECK(test_successes_before_failures(1, 0.5, 20000, rng).passed());
}

TEST_CASE("exchangeability permutation test") {
  Rng rng(7);
  const std::vector<double> same{1, 2, 3, 4, 5, 6, 7, 8};
  CHECK(test_exchangeability({same, same}, 999, rng) == 1.0);

  std::vector<std::vector<double>> null(3, std::vector<double>(500));
  for (auto& row : null) {
    for (auto& v : row) v = static_cast<double>(poisson(rng, 2.0));
  }
  CHECK(test_exchangeability(null, 999, rng) > 1e-3);

  std::vector<std::vector<double>> shifted(2, std::vector<double>(500));
  for (std::size_t j = 0; j < 500; ++j) {
    shifted[0][j] = static_cast<double>(poisson(rng, 2.0));
    shifted[1][j] = 10.0 + static_cast<double>(poisson(rng, 2.0));
  }
  CHECK(test_exchangeability(shifted, 1999, rng) < 1e-3);
}
