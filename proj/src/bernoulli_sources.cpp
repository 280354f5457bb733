#include "nbp/bernoulli_sources.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>

#include "nbp/errors.hpp"

namespace nbp {

namespace {

// Appends `count` fresh Uniform[0, 1) locations, none of which may already
// occur in `taken` or among themselves.
template <typename Taken>
void append_fresh_locations(std::vector<double>& out, std::uint64_t count, Rng& rng,
                            const Taken& taken) {
  const auto first_new = out.size();
  for (std::uint64_t i = 0; i < count; ++i) {
    const double s = rng.uniform01();
    if (taken(s) || std::find(out.begin() + static_cast<std::ptrdiff_t>(first_new), out.end(), s) !=
                        out.end()) {
      throw LocationCollision("fresh location " + std::to_string(s) + " collides with an existing atom");
    }
    out.push_back(s);
  }
}

}  // namespace

SimplePointProcess sample_bep(const BaseMeasureSpec& base, Rng& rng) {
  std::vector<double> atoms;
  for (const auto& atom : base.fixed_atoms()) {
    if (bernoulli(rng, atom.mass)) atoms.push_back(atom.location.value);
  }
  const auto ordinary = poisson(rng, base.diffuse_mass());
  const auto& fixed = base.fixed_atoms();
  append_fresh_locations(atoms, ordinary, rng, [&](double s) {
    return std::any_of(fixed.begin(), fixed.end(),
                       [s](const FixedAtom& a) { return a.location.value == s; });
  });
  return SimplePointProcess(std::move(atoms));
}

MixtureDirectedSource::MixtureDirectedSource(
    std::vector<std::pair<double, BaseMeasureSpec>> components, Rng rng)
    : components_(std::move(components)), rng_(rng) {
  if (components_.empty()) throw std::invalid_argument("MixtureDirectedSource: no components");
  double total = 0.0;
  for (const auto& [w, base] : components_) {
    if (!(w >= 0.0)) throw std::invalid_argument("MixtureDirectedSource: negative weight");
    total += w;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("MixtureDirectedSource: weights must sum to one");
  }
}

SimplePointProcess MixtureDirectedSource::generate() {
  if (!picked_) {
    const double u = rng_.uniform01();
    double cumulative = 0.0;
    chosen_ = components_.size() - 1;
    for (std::size_t i = 0; i < components_.size(); ++i) {
      cumulative += components_[i].first;
      if (u < cumulative) {
        chosen_ = i;
        break;
      }
    }
    picked_ = true;
  }
  return sample_bep(components_[chosen_].second, rng_);
}

SimplePointProcess ScriptedSource::generate() {
  if (emitted() >= script_.size()) throw std::out_of_range("ScriptedSource: script exhausted");
  return script_[emitted()];
}

SimplePointProcess ibp_next(IbpState& state, Rng& rng) {
  const double denom = state.c + static_cast<double>(state.n);
  std::vector<double> atoms;
  for (const auto& [s, count] : state.dish_counts) {
    if (rng.uniform01() < static_cast<double>(count) / denom) atoms.push_back(s);
  }
  const auto fresh = poisson(rng, state.c * state.gamma / denom);
  append_fresh_locations(atoms, fresh, rng,
                         [&](double s) { return state.dish_counts.contains(s); });
  for (double s : atoms) ++state.dish_counts[s];
  ++state.n;
  return SimplePointProcess(std::move(atoms));
}

IbpSource::IbpSource(double c, double gamma, Rng rng) : rng_(rng) {
  if (!(std::isfinite(c) && c > 0.0)) throw std::invalid_argument("IbpSource: c must be positive");
  if (!(std::isfinite(gamma) && gamma > 0.0)) {
    throw std::invalid_argument("IbpSource: gamma must be positive");
  }
  state_.c = c;
  state_.gamma = gamma;
}

SimplePointProcess opp_next(OneParameterState& state, const SimplePointProcess& y, Rng& rng) {
  SimplePointProcess out;
  if (state.n == 0) {
    out = y;
  } else {
    const double denom = state.c + static_cast<double>(state.n);
    std::vector<double> candidates(y.atoms().begin(), y.atoms().end());
    for (const auto& [s, count] : state.w_counts) candidates.push_back(s);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    std::vector<double> atoms;
    for (double s : candidates) {
      const auto it = state.w_counts.find(s);
      const double history = it == state.w_counts.end() ? 0.0 : static_cast<double>(it->second);
      const double weight = (y.contains(Location{s}) ? state.c : 0.0) + history;
      if (rng.uniform01() < weight / denom) atoms.push_back(s);
    }
    out = SimplePointProcess(std::move(atoms));
  }
  for (double s : out.atoms()) ++state.w_counts[s];
  ++state.n;
  return out;
}

OneParameterSource::OneParameterSource(double c, std::unique_ptr<BernoulliSequenceSource> inner,
                                       Rng rng)
    : inner_(std::move(inner)), rng_(rng) {
  if (!(std::isfinite(c) && c > 0.0)) {
    throw std::invalid_argument("OneParameterSource: c must be positive");
  }
  if (!inner_) throw std::invalid_argument("OneParameterSource: null inner source");
  state_.c = c;
}

std::unique_ptr<BernoulliSequenceSource> make_hierarchy_source(double c, double gamma,
                                                               unsigned levels, const Rng& rng) {
  std::unique_ptr<BernoulliSequenceSource> source =
      std::make_unique<IbpSource>(c, gamma, rng.substream("ibp"));
  for (unsigned level = 1; level <= levels; ++level) {
    source = std::make_unique<OneParameterSource>(c, std::move(source),
                                                  rng.substream("one-parameter", level));
  }
  return source;
}

namespace {

/// d (d - 1) / 2, or nullopt on overflow.
std::optional<std::uint64_t> triangular(std::uint64_t d) {
  if (d == 0) return 0;
  std::uint64_t a = d;
  std::uint64_t b = d - 1;
  (a % 2 == 0 ? a : b) /= 2;
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) return std::nullopt;
  return out;
}

}  // namespace

std::uint64_t pairing_index(std::uint64_t n, std::uint64_t m) {
  if (n == 0 || m == 0) throw std::invalid_argument("pairing_index: indices start at 1");
  std::uint64_t d = 0;
  std::uint64_t index = 0;
  const auto t = __builtin_add_overflow(n, m - 1, &d) ? std::nullopt : triangular(d);
  if (!t || __builtin_add_overflow(*t, n, &index)) throw std::overflow_error("pairing_index: overflow");
  return index;
}

std::pair<std::uint64_t, std::uint64_t> pairing_inverse(std::uint64_t index) {
  if (index == 0) throw std::invalid_argument("pairing_inverse: indices start at 1");
  // Diagonal d is the least d with d (d + 1) / 2 >= index.
  const auto covers = [index](std::uint64_t d) {
    const auto t = triangular(d + 1);
    return !t || *t >= index;
  };
  auto d = static_cast<std::uint64_t>((std::sqrt(8.0 * static_cast<double>(index) + 1.0) - 1.0) / 2.0);
  while (!covers(d)) ++d;
  while (d > 1 && covers(d - 1)) --d;
  const auto n = index - *triangular(d);
  return {n, d + 1 - n};
}

BernoulliArraySource::BernoulliArraySource(std::unique_ptr<BernoulliSequenceSource> sequence,
                                           std::uint64_t max_cached)
    : sequence_(std::move(sequence)), max_cached_(max_cached) {
  if (!sequence_) throw std::invalid_argument("BernoulliArraySource: null sequence");
}

std::span<const double> BernoulliArraySource::element(std::uint64_t index) {
  if (index > max_cached_) {
    throw CacheBudgetExceeded("array element " + std::to_string(index) +
                              " exceeds the cache budget of " + std::to_string(max_cached_));
  }
  while (cached() < index) {
    const auto next = sequence_->next();
    atoms_.insert(atoms_.end(), next.atoms().begin(), next.atoms().end());
    offsets_.push_back(atoms_.size());
  }
  const auto begin = offsets_[index - 1];
  const auto end = offsets_[index];
  return std::span<const double>(atoms_).subspan(begin, end - begin);
}

std::span<const double> BernoulliArraySource::atoms_at(std::uint64_t n, std::uint64_t m) {
  return element(pairing_index(n, m));
}

SimplePointProcess BernoulliArraySource::get(std::uint64_t n, std::uint64_t m) {
  const auto atoms = atoms_at(n, m);
  return SimplePointProcess(std::vector<double>(atoms.begin(), atoms.end()));
}

bool BernoulliArraySource::contains(std::uint64_t n, std::uint64_t m, Location s) {
  const auto atoms = atoms_at(n, m);
  return std::binary_search(atoms.begin(), atoms.end(), s.value);
}

}  // namespace nbp
