#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <memory>
#include <string>

#include "nbp/bernoulli_sources.hpp"
#include "nbp/errors.hpp"
#include "nbp/measures.hpp"
#include "nbp/rng.hpp"

namespace nbp {

/// Anything that yields a sequence of 0/1 coins.
template <typename T>
concept CoinSource = requires(T& coins) {
  { coins.next() } -> std::convertible_to<bool>;
};

/**
 * Coins of one atom along one row of an array: coin m is whether `atom` is a
 * point of Y_{row,m}. Reads the array lazily; the cursor only moves forward.
 */
class CoinStream {
 public:
  CoinStream(BernoulliArraySource& array, std::uint64_t row, Location atom)
      : array_(&array), row_(row), atom_(atom) {}

  bool next() { return array_->contains(row_, cursor_++, atom_); }

  /// Index of the next coin to be read (1-based).
  std::uint64_t cursor() const { return cursor_; }
  std::uint64_t consumed() const { return cursor_ - 1; }
  Location atom() const { return atom_; }

 private:
  BernoulliArraySource* array_;
  std::uint64_t row_;
  Location atom_;
  std::uint64_t cursor_ = 1;
};

/// i.i.d. p-coins, for validating the urn count against its known law.
class BernoulliCoins {
 public:
  BernoulliCoins(Rng& rng, double p) : rng_(&rng), p_(p) {}
  bool next() { return bernoulli(*rng_, p_); }

 private:
  Rng* rng_;
  double p_;
};

struct FactoryConfig {
  static constexpr std::uint64_t kDefaultMaxCoins = 1'000'000;
  static constexpr std::uint64_t kDefaultMaxProposals = 10'000;

  double r = 1.0;
  std::uint64_t max_coins = kDefaultMaxCoins;
  std::uint64_t max_proposals = kDefaultMaxProposals;

  /// Throws std::invalid_argument unless r > 0 and both budgets are positive.
  void validate() const;
  std::uint64_t ceil_r() const { return static_cast<std::uint64_t>(std::ceil(r)); }
  bool integer_r() const { return r == std::floor(r); }
};

/// Successes before the r-th failure, i.e. the least m with
/// m = coin(1) + ... + coin(m + r). Consumes exactly result + r coins.
/// Throws CoinBudgetExceeded if `budget` coins pass without r failures.
template <CoinSource Coins>
std::uint64_t urn_count_single_atom(Coins& coins, std::uint64_t r, std::uint64_t budget) {
  if (r == 0) throw std::invalid_argument("urn_count_single_atom: r must be at least 1");
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t used = 0;
  while (failures < r) {
    if (used == budget) {
      throw CoinBudgetExceeded("coin budget of " + std::to_string(budget) + " exhausted after " +
                               std::to_string(successes) + " successes and " +
                               std::to_string(failures) + " failures");
    }
    ++used;
    if (coins.next()) {
      ++successes;
    } else {
      ++failures;
    }
  }
  return successes;
}

/// log (a)_k = log Gamma(a + k) - log Gamma(a).
double rising_factorial_log(double a, std::uint64_t k);

/// (r)_w / (ceil r)_w, evaluated in log space.
double acceptance_prob(std::uint64_t w, double r);

struct FactoryDraw {
  std::uint64_t value = 0;
  std::uint64_t proposals = 0;
  std::uint64_t coins = 0;
};

/**
 * Negative binomial factory: NB(r, p) from p-coins with p unknown.
 *
 * Each proposal is an NB(ceil r, p) urn count on the next unread coins; it is
 * accepted when a uniform from `uniforms` falls below acceptance_prob. The
 * coin budget covers all proposals of one call. For integer r the first
 * proposal is always accepted, so the value equals urn_count_single_atom on
 * the same coins.
 */
template <CoinSource Coins>
FactoryDraw nb_factory(Coins& coins, const FactoryConfig& cfg, Rng& uniforms) {
  cfg.validate();
  const auto proposal_r = cfg.ceil_r();
  FactoryDraw draw;
  while (draw.proposals < cfg.max_proposals) {
    const auto w = urn_count_single_atom(coins, proposal_r, cfg.max_coins - draw.coins);
    draw.coins += w + proposal_r;
    ++draw.proposals;
    if (uniforms.uniform01() < acceptance_prob(w, cfg.r)) {
      draw.value = w;
      return draw;
    }
  }
  throw ProposalBudgetExceeded("negative binomial factory rejected " +
                               std::to_string(cfg.max_proposals) + " proposals");
}

/// Union of the supports of Y_{n,1..width}; kappa is its size.
struct SupportIndex {
  SimplePointProcess atoms;
  std::size_t kappa() const { return atoms.size(); }
};

SupportIndex support_index(BernoulliArraySource& array, std::uint64_t n, std::uint64_t width);

/// Accumulated cost of row constructions.
struct RowStats {
  std::uint64_t coins = 0;
  std::uint64_t proposals = 0;
  std::uint64_t support = 0;
};

/// Row n of the negative binomial urn scheme with integer r >= 1: every atom
/// of the first r columns gets its successes-before-r-failures count.
MultisetPointProcess nb_urn_row(BernoulliArraySource& array, std::uint64_t n, std::uint64_t r,
                                std::uint64_t max_coins = FactoryConfig::kDefaultMaxCoins,
                                RowStats* stats = nullptr);

/// Row n for any r > 0: support from the first ceil(r) columns, each atom's
/// multiplicity from nb_factory on its own coin stream. Atoms are visited in
/// sorted order and share `uniforms`.
MultisetPointProcess nb_row_fractional(BernoulliArraySource& array, std::uint64_t n,
                                       const FactoryConfig& cfg, Rng& uniforms,
                                       RowStats* stats = nullptr);

/**
 * Exchangeable sequence X_1, X_2, ... of negative binomial processes built from
 * one Bernoulli sequence source. Integer r uses the urn scheme, other r the
 * factory path.
 */
class NegativeBinomialSequence {
 public:
  NegativeBinomialSequence(std::unique_ptr<BernoulliSequenceSource> source, FactoryConfig cfg,
                           Rng uniforms,
                           std::uint64_t max_cached = BernoulliArraySource::kDefaultMaxCached);

  MultisetPointProcess next(RowStats* stats = nullptr);
  std::uint64_t rows_emitted() const { return row_; }
  BernoulliArraySource& array() { return array_; }

 private:
  BernoulliArraySource array_;
  FactoryConfig cfg_;
  Rng uniforms_;
  std::uint64_t row_ = 0;
};

}  // namespace nbp
