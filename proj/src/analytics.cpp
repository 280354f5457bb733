#include "nbp/analytics.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "nbp/nb_construct.hpp"

namespace nbp {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

void require_nb_params(double r, double p) {
  require(std::isfinite(r) && r > 0.0, "nb_pmf: r must be positive");
  require(p > 0.0 && p < 1.0, "nb_pmf: p must lie in (0, 1)");
}

constexpr int kMaxGammaIterations = 1000;
constexpr double kGammaEps = 1e-15;

double gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int i = 1; i < kMaxGammaIterations; ++i) {
    term *= x / (a + i);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kGammaEps) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxGammaIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kGammaEps) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::string bin_label(std::uint64_t lo, std::uint64_t hi, bool open_right) {
  if (open_right) return ">=" + std::to_string(lo);
  if (lo == hi) return std::to_string(lo);
  return std::to_string(lo) + "-" + std::to_string(hi);
}

}  // namespace

double nb_log_pmf(std::uint64_t k, double r, double p) {
  require_nb_params(r, p);
  const double kd = static_cast<double>(k);
  return rising_factorial_log(r, k) - std::lgamma(kd + 1.0) + kd * std::log(p) +
         r * std::log1p(-p);
}

double nb_pmf(std::uint64_t k, double r, double p) { return std::exp(nb_log_pmf(k, r, p)); }

double poisson_pmf(std::uint64_t k, double lambda) {
  require(std::isfinite(lambda) && lambda >= 0.0, "poisson_pmf: lambda must be non-negative");
  if (lambda == 0.0) return k == 0 ? 1.0 : 0.0;
  const double kd = static_cast<double>(k);
  return std::exp(kd * std::log(lambda) - lambda - std::lgamma(kd + 1.0));
}

double mixture_nb_pmf(std::uint64_t k, double r, std::span<const MixtureComponent> components) {
  require(!components.empty(), "mixture_nb_pmf: no components");
  double total_weight = 0.0;
  double value = 0.0;
  for (const auto& c : components) {
    require(c.weight >= 0.0, "mixture_nb_pmf: negative weight");
    total_weight += c.weight;
    value += c.weight * nb_pmf(k, r, c.p);
  }
  require(std::fabs(total_weight - 1.0) <= 1e-9, "mixture_nb_pmf: weights must sum to one");
  return value;
}

double regularized_gamma_p(double a, double x) {
  require(a > 0.0 && x >= 0.0, "regularized_gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_continued_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  require(a > 0.0 && x >= 0.0, "regularized_gamma_q: need a > 0, x >= 0");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double statistic, std::uint64_t dof) {
  require(dof > 0, "chi_square_sf: dof must be positive");
  if (statistic <= 0.0) return 1.0;
  return std::clamp(regularized_gamma_q(0.5 * static_cast<double>(dof), 0.5 * statistic), 0.0, 1.0);
}

GofResult chi_square_gof(std::span<const std::uint64_t> observed, const Pmf& pmf,
                         std::uint64_t n_samples, double alpha) {
  require(n_samples > 0, "chi_square_gof: need at least one sample");
  const auto total_observed = std::accumulate(observed.begin(), observed.end(), std::uint64_t{0});
  require(total_observed == n_samples, "chi_square_gof: observed counts must sum to n_samples");

  const double n = static_cast<double>(n_samples);
  // Suffix sums of observed so the tail bin can take everything beyond k.
  std::vector<double> observed_tail(observed.size() + 1, 0.0);
  for (std::size_t k = observed.size(); k-- > 0;) {
    observed_tail[k] = observed_tail[k + 1] + static_cast<double>(observed[k]);
  }
  auto observed_from = [&](std::uint64_t k) {
    return k < observed_tail.size() ? observed_tail[k] : 0.0;
  };

  GofResult result;
  result.alpha = alpha;
  double cdf = 0.0;
  GofBin current;
  std::uint64_t bin_start = 0;
  for (std::uint64_t k = 0;; ++k) {
    const double mass = pmf(k);
    cdf += mass;
    current.expected += n * mass;
    current.observed += k < observed.size() ? static_cast<double>(observed[k]) : 0.0;
    const double tail_expected = n * std::max(0.0, 1.0 - cdf);
    if (tail_expected < kMinExpectedPerBin || k >= 10'000'000) {
      current.expected += tail_expected;
      current.observed += observed_from(k + 1);
      current.label = bin_label(bin_start, k, true);
      result.bins.push_back(current);
      break;
    }
    if (current.expected >= kMinExpectedPerBin) {
      current.label = bin_label(bin_start, k, false);
      result.bins.push_back(current);
      current = GofBin{};
      bin_start = k + 1;
    }
  }
  // The closing tail bin may still be small; fold it into its neighbour.
  if (result.bins.size() >= 2 && result.bins.back().expected < kMinExpectedPerBin) {
    auto last = result.bins.back();
    result.bins.pop_back();
    auto& prev = result.bins.back();
    prev.expected += last.expected;
    prev.observed += last.observed;
    const auto dash = prev.label.find('-');
    prev.label = ">=" + (dash == std::string::npos ? prev.label : prev.label.substr(0, dash));
  }
  if (result.bins.size() < 2) {
    throw InsufficientBins("chi_square_gof: fewer than two bins after tail merging");
  }

  for (const auto& bin : result.bins) {
    const double diff = bin.observed - bin.expected;
    result.statistic += diff * diff / bin.expected;
  }
  result.degrees_of_freedom = result.bins.size() - 1;
  result.p_value = chi_square_sf(result.statistic, result.degrees_of_freedom);
  return result;
}

std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> values) {
  std::vector<std::uint64_t> counts;
  for (auto v : values) {
    if (v >= counts.size()) counts.resize(v + 1, 0);
    ++counts[v];
  }
  return counts;
}

double sample_mean(std::span<const double> xs) {
  require(!xs.empty(), "sample_mean: empty sample");
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(std::span<const double> xs) { return sample_covariance(xs, xs); }

double sample_covariance(std::span<const double> xs, std::span<const double> ys) {
  require(xs.size() == ys.size() && xs.size() >= 2, "sample_covariance: need two paired samples");
  const double mx = sample_mean(xs);
  const double my = sample_mean(ys);
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) acc += (xs[i] - mx) * (ys[i] - my);
  return acc / static_cast<double>(xs.size() - 1);
}

double bootstrap_covariance_se(std::span<const double> xs, std::span<const double> ys,
                               std::size_t resamples, Rng& rng) {
  require(xs.size() == ys.size() && xs.size() >= 2, "bootstrap_covariance_se: need paired data");
  require(resamples >= 2, "bootstrap_covariance_se: need at least two resamples");
  const auto n = xs.size();
  std::vector<double> bx(n);
  std::vector<double> by(n);
  std::vector<double> estimates;
  estimates.reserve(resamples);
  for (std::size_t b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(n));
      bx[i] = xs[j];
      by[i] = ys[j];
    }
    estimates.push_back(sample_covariance(bx, by));
  }
  return std::sqrt(sample_variance(estimates));
}

LaplaceCheck mc_laplace_check(const std::function<MultisetPointProcess()>& sampler,
                              const StepFunction& f, double analytic, std::uint64_t n_samples) {
  require(analytic > 0.0 && analytic <= 1.0, "mc_laplace_check: analytic value must lie in (0, 1]");
  require(n_samples >= 2, "mc_laplace_check: need at least two samples");
  std::vector<double> values;
  values.reserve(n_samples);
  for (std::uint64_t i = 0; i < n_samples; ++i) {
    values.push_back(std::exp(-integral_against(sampler(), f)));
  }
  LaplaceCheck check;
  check.samples = n_samples;
  check.mean = sample_mean(values);
  check.std_error = std::sqrt(sample_variance(values) / static_cast<double>(n_samples));
  const double diff = check.mean - analytic;
  if (check.std_error > 0.0) {
    check.z = diff / check.std_error;
  } else if (std::fabs(diff) > 1e-12) {
    check.z = std::copysign(std::numeric_limits<double>::infinity(), diff);
  }
  return check;
}

GofResult test_sum_property(std::span<const double> r_list, double p, std::uint64_t n_samples,
                            Rng& rng, double alpha) {
  require(!r_list.empty(), "test_sum_property: empty r list");
  double r_total = 0.0;
  for (double r : r_list) r_total += r;
  std::vector<std::uint64_t> sums(n_samples, 0);
  for (auto& sum : sums) {
    for (double r : r_list) sum += negbin_oracle(rng, r, p);
  }
  const auto counts = histogram(sums);
  return chi_square_gof(counts, [&](std::uint64_t k) { return nb_pmf(k, r_total, p); }, n_samples,
                        alpha);
}

GofResult test_successes_before_failures(std::uint64_t r, double p, std::uint64_t n_samples,
                                         Rng& rng, double alpha) {
  require(r >= 1, "test_successes_before_failures: r must be at least 1");
  require(p > 0.0 && p < 1.0, "test_successes_before_failures: p must lie in (0, 1)");
  std::vector<std::uint64_t> draws(n_samples);
  BernoulliCoins coins(rng, p);
  for (auto& d : draws) d = urn_count_single_atom(coins, r, FactoryConfig::kDefaultMaxCoins);
  const auto counts = histogram(draws);
  return chi_square_gof(counts, [&](std::uint64_t k) { return nb_pmf(k, static_cast<double>(r), p); },
                        n_samples, alpha);
}

double test_exchangeability(const std::vector<std::vector<double>>& rows,
                            std::uint64_t n_permutations, Rng& rng) {
  require(rows.size() >= 2, "test_exchangeability: need at least two rows");
  const auto replicates = rows.front().size();
  require(replicates >= 2, "test_exchangeability: need at least two replicates");
  for (const auto& row : rows) {
    require(row.size() == replicates, "test_exchangeability: rows differ in replicate count");
  }
  require(n_permutations >= 1, "test_exchangeability: need at least one permutation");

  const auto k = rows.size();
  auto statistic = [&](const std::vector<std::vector<double>>& data) {
    std::vector<double> means(k);
    for (std::size_t i = 0; i < k; ++i) means[i] = sample_mean(data[i]);
    const double grand = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(k);
    double t = 0.0;
    for (double m : means) t += (m - grand) * (m - grand);
    return t;
  };

  const double observed = statistic(rows);
  const double threshold = observed - 1e-12 * std::max(1.0, observed);
  auto shuffled = rows;
  std::vector<double> column(k);
  std::uint64_t at_least = 0;
  for (std::uint64_t b = 0; b < n_permutations; ++b) {
    for (std::size_t j = 0; j < replicates; ++j) {
      for (std::size_t i = 0; i < k; ++i) column[i] = rows[i][j];
      for (std::size_t i = k - 1; i > 0; --i) {
        const auto swap_with = static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i + 1));
        std::swap(column[i], column[swap_with]);
      }
      for (std::size_t i = 0; i < k; ++i) shuffled[i][j] = column[i];
    }
    if (statistic(shuffled) >= threshold) ++at_least;
  }
  return static_cast<double>(1 + at_least) / static_cast<double>(1 + n_permutations);
}

}  // namespace nbp
