#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "nbp/measures.hpp"
#include "nbp/rng.hpp"

namespace nbp {

/// Draw from BeP(base): each fixed atom independently with probability equal
/// to its mass, plus Poisson(diffuse mass) fresh uniform locations.
SimplePointProcess sample_bep(const BaseMeasureSpec& base, Rng& rng);

/**
 * Lazy producer of an exchangeable sequence of Bernoulli processes.
 *
 * Outputs are strictly sequential: the (n+1)-th may depend on the first n.
 * The directing random measure is never represented.
 */
class BernoulliSequenceSource {
 public:
  virtual ~BernoulliSequenceSource() = default;

  SimplePointProcess next() {
    auto out = generate();
    ++emitted_;
    return out;
  }
  std::uint64_t emitted() const { return emitted_; }

 protected:
  virtual SimplePointProcess generate() = 0;

 private:
  std::uint64_t emitted_ = 0;
};

/// i.i.d. BeP(base) for a known base measure.
class IidBernoulliSource final : public BernoulliSequenceSource {
 public:
  IidBernoulliSource(BaseMeasureSpec base, Rng rng) : base_(std::move(base)), rng_(rng) {}

 protected:
  SimplePointProcess generate() override { return sample_bep(base_, rng_); }

 private:
  BaseMeasureSpec base_;
  Rng rng_;
};

/**
 * Exchangeable source directed by a base measure picked once at random from
 * a finite list, then i.i.d. BeP given that pick. The pick happens on the
 * first output and stays internal to the source.
 */
class MixtureDirectedSource final : public BernoulliSequenceSource {
 public:
  /// Weights must be non-negative and sum to one (within 1e-9).
  MixtureDirectedSource(std::vector<std::pair<double, BaseMeasureSpec>> components, Rng rng);

 protected:
  SimplePointProcess generate() override;

 private:
  std::vector<std::pair<double, BaseMeasureSpec>> components_;
  Rng rng_;
  std::size_t chosen_ = 0;
  bool picked_ = false;
};

/// Replays a fixed list of processes; throws std::out_of_range past the end.
class ScriptedSource final : public BernoulliSequenceSource {
 public:
  explicit ScriptedSource(std::vector<SimplePointProcess> script) : script_(std::move(script)) {}

 protected:
  SimplePointProcess generate() override;

 private:
  std::vector<SimplePointProcess> script_;
};

// Indian buffet process with constant concentration c and B0 = gamma * Uniform[0, 1].

struct IbpState {
  double c = 1.0;
  double gamma = 1.0;
  std::uint64_t n = 0;
  /// Dish location -> number of outputs so far containing it.
  std::map<double, std::uint64_t> dish_counts;
};

/// Output n+1: dish s kept w.p. m_s / (c + n), plus Poisson(c gamma / (c + n))
/// new dishes. Updates the state.
SimplePointProcess ibp_next(IbpState& state, Rng& rng);

class IbpSource final : public BernoulliSequenceSource {
 public:
  /// Throws std::invalid_argument unless c > 0 and gamma > 0.
  IbpSource(double c, double gamma, Rng rng);

  const IbpState& state() const { return state_; }

 protected:
  SimplePointProcess generate() override { return ibp_next(state_, rng_); }

 private:
  IbpState state_;
  Rng rng_;
};

// One-parameter process induced by an inner exchangeable sequence Y.

struct OneParameterState {
  double c = 1.0;
  std::uint64_t n = 0;
  /// Location -> number of earlier outputs W_j containing it.
  std::map<double, std::uint64_t> w_counts;
};

/// Given the inner output y = Y_{n+1}: the first call returns y; later calls
/// keep each s in y or in the history w.p. (c [s in y] + sum_j W_j{s}) / (c + n).
SimplePointProcess opp_next(OneParameterState& state, const SimplePointProcess& y, Rng& rng);

class OneParameterSource final : public BernoulliSequenceSource {
 public:
  OneParameterSource(double c, std::unique_ptr<BernoulliSequenceSource> inner, Rng rng);

  const OneParameterState& state() const { return state_; }

 protected:
  SimplePointProcess generate() override { return opp_next(state_, inner_->next(), rng_); }

 private:
  OneParameterState state_;
  std::unique_ptr<BernoulliSequenceSource> inner_;
  Rng rng_;
};

/// `levels` one-parameter processes stacked over an IBP(c, gamma) source.
/// levels == 0 returns the IBP source itself.
std::unique_ptr<BernoulliSequenceSource> make_hierarchy_source(double c, double gamma,
                                                               unsigned levels, const Rng& rng);

/// Diagonal enumeration of N x N: (1,1),(1,2),(2,1),(1,3),(2,2),(3,1),...
/// Throws std::overflow_error if the index does not fit in 64 bits.
std::uint64_t pairing_index(std::uint64_t n, std::uint64_t m);
std::pair<std::uint64_t, std::uint64_t> pairing_inverse(std::uint64_t index);

/**
 * Two-dimensional view Y_{n,m} of one sequence source through `pairing_index`.
 *
 * Cell (n, m) is the pairing_index(n, m)-th output of the sequence. Outputs
 * are generated in order, each at most once, and cached. The cache holds at
 * most `max_cached` elements; requesting a later cell throws
 * CacheBudgetExceeded. Not thread-safe.
 */
class BernoulliArraySource {
 public:
  static constexpr std::uint64_t kDefaultMaxCached = 10'000'000;

  explicit BernoulliArraySource(std::unique_ptr<BernoulliSequenceSource> sequence,
                                std::uint64_t max_cached = kDefaultMaxCached);

  /// Atoms of Y_{n,m}, valid until the next call that grows the cache.
  std::span<const double> atoms_at(std::uint64_t n, std::uint64_t m);
  SimplePointProcess get(std::uint64_t n, std::uint64_t m);
  bool contains(std::uint64_t n, std::uint64_t m, Location s);

  std::uint64_t cached() const { return offsets_.size() - 1; }

 private:
  std::span<const double> element(std::uint64_t index);

  std::unique_ptr<BernoulliSequenceSource> sequence_;
  std::uint64_t max_cached_;
  // Flat storage: element k (1-based) occupies atoms_[offsets_[k-1], offsets_[k]).
  std::vector<std::uint64_t> offsets_{0};
  std::vector<double> atoms_;
};

}  // namespace nbp
