#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace nbp {

/// 64-bit finalizer from SplitMix64. Used both to seed the engine state and
/// to mix (seed, label) pairs into substream seeds.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// FNV-1a over the bytes of a label.
constexpr std::uint64_t hash_label(std::string_view label) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (char ch : label) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ULL;
  }
  return h;
}

/// Seed of the substream named `label` under `seed`:
///   mix64(seed + 0x9E3779B97F4A7C15 * (hash_label(label) | 1)).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label) {
  return mix64(seed + 0x9E3779B97F4A7C15ULL * (hash_label(label) | 1ULL));
}

/// Indexed variant, for replicate `index` of a labelled family.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::string_view label,
                                    std::uint64_t index) {
  return mix64(derive_seed(seed, label) ^ mix64(index + 0x632BE59BD9B4E019ULL));
}

/**
 * Seedable random state: xoshiro256++ seeded through SplitMix64.
 *
 * Output is bit-identical for a given seed. A state is single-consumer; move
 * it between threads if needed but never share one concurrently. Independent
 * consumers should take their own `substream`.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0);

  std::uint64_t seed() const { return seed_; }

  /// Fresh state for the substream `label` of this state's seed. Does not
  /// advance *this.
  Rng substream(std::string_view label) const {
    return Rng(derive_seed(seed_, label));
  }
  Rng substream(std::string_view label, std::uint64_t index) const {
    return Rng(derive_seed(seed_, label, index));
  }

  std::uint64_t next_u64();

  /// 53-bit uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t seed_;
  std::array<std::uint64_t, 4> s_{};
};

// Primitive samplers. All throw std::invalid_argument on bad parameters.

/// 1 with probability p. Requires 0 <= p <= 1.
bool bernoulli(Rng& rng, double p);

/// Poisson(lambda). Inversion for lambda <= 10, transformed rejection (PTRS)
/// above that.
std::uint64_t poisson(Rng& rng, double lambda);

/// Gamma(shape, scale). Marsaglia-Tsang squeeze; shapes below one are boosted
/// by one and corrected with U^(1/shape).
double gamma(Rng& rng, double shape, double scale);

/// NB(r, p) through the Gamma-Poisson mixture lambda ~ Gamma(r, p/(1-p)).
/// Independent of the coin-based constructions; meant as a test oracle.
std::uint64_t negbin_oracle(Rng& rng, double r, double p);

}  // namespace nbp
