#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nbp/measures.hpp"
#include "nbp/rng.hpp"

namespace nbp {

/// log of (r)_k / k! p^k (1-p)^r.
double nb_log_pmf(std::uint64_t k, double r, double p);
/// NB(r, p) pmf. Throws std::invalid_argument unless r > 0 and 0 < p < 1.
double nb_pmf(std::uint64_t k, double r, double p);

double poisson_pmf(std::uint64_t k, double lambda);

struct MixtureComponent {
  double weight = 0.0;
  double p = 0.0;
};

/// sum_i w_i nb_pmf(k, r, p_i); weights must be non-negative and sum to one.
double mixture_nb_pmf(std::uint64_t k, double r, std::span<const MixtureComponent> components);

/// Regularized lower/upper incomplete gamma P(a, x), Q(a, x). Series
/// expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution.
double chi_square_sf(double statistic, std::uint64_t dof);

struct GofBin {
  std::string label;
  double observed = 0.0;
  double expected = 0.0;
};

struct GofResult {
  double statistic = 0.0;
  std::uint64_t degrees_of_freedom = 0;
  double p_value = 1.0;
  double alpha = 1e-3;
  std::vector<GofBin> bins;

  bool passed() const { return p_value > alpha; }
};

/// Thrown when tail merging leaves fewer than two bins.
class InsufficientBins : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Pmf = std::function<double(std::uint64_t)>;

/// Minimum expected count per bin after merging.
inline constexpr double kMinExpectedPerBin = 5.0;

/**
 * Pearson chi-square test of integer data against a fully specified pmf.
 *
 * `observed[k]` is the number of samples equal to k, and must sum to
 * `n_samples`. Bins are grown left to right until each holds expected count
 * >= 5; the last bin absorbs the whole right tail. No parameters are
 * estimated, so dof = bins - 1.
 */
GofResult chi_square_gof(std::span<const std::uint64_t> observed, const Pmf& pmf,
                         std::uint64_t n_samples, double alpha = 1e-3);

/// Counts per value: out[k] = #{i : values[i] == k}.
std::vector<std::uint64_t> histogram(std::span<const std::uint64_t> values);

double sample_mean(std::span<const double> xs);
/// Unbiased sample variance.
double sample_variance(std::span<const double> xs);
/// Unbiased sample covariance.
double sample_covariance(std::span<const double> xs, std::span<const double> ys);

/// Bootstrap standard error of the sample covariance over paired data.
double bootstrap_covariance_se(std::span<const double> xs, std::span<const double> ys,
                               std::size_t resamples, Rng& rng);

struct LaplaceCheck {
  double mean = 0.0;
  double std_error = 0.0;
  /// 0 when the samples are constant and equal to the analytic value;
  /// +-infinity when they are constant and differ from it.
  double z = 0.0;
  std::uint64_t samples = 0;

  bool passed(double max_abs_z = 4.0) const { return std::abs(z) < max_abs_z; }
};

/// Monte-Carlo estimate of E exp(-X(f)) compared with `analytic`.
LaplaceCheck mc_laplace_check(const std::function<MultisetPointProcess()>& sampler,
                              const StepFunction& f, double analytic, std::uint64_t n_samples);

/// Sum of independent NB(r_i, p) oracle draws against NB(sum r_i, p).
GofResult test_sum_property(std::span<const double> r_list, double p, std::uint64_t n_samples,
                            Rng& rng, double alpha = 1e-3);

/// Urn counts over i.i.d. p-coins against NB(r, p).
GofResult test_successes_before_failures(std::uint64_t r, double p, std::uint64_t n_samples,
                                         Rng& rng, double alpha = 1e-3);

/**
 * Permutation test of exchangeability across rows.
 *
 * `rows[i][j]` is a statistic of row i in replicate j. Under the null the
 * values of one replicate are exchangeable across rows, so permutations are
 * drawn within each replicate. The statistic is the between-row sum of
 * squared deviations of row means (for two rows, a paired sign-flip test).
 * Returns (1 + #{T* >= T}) / (1 + n_permutations).
 */
double test_exchangeability(const std::vector<std::vector<double>>& rows,
                            std::uint64_t n_permutations, Rng& rng);

}  // namespace nbp
