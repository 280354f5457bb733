#include "nbp/nb_construct.hpp"

#include <cstdio>
#include <vector>

namespace nbp {

namespace {

std::string atom_context(std::uint64_t n, Location atom) {
  char buf[96];
  std::snprintf(buf, sizeof buf, " (row %llu, atom %.17g)", static_cast<unsigned long long>(n),
                atom.value);
  return buf;
}

}  // namespace

void FactoryConfig::validate() const {
  if (!(std::isfinite(r) && r > 0.0)) throw std::invalid_argument("FactoryConfig: r must be positive");
  if (max_coins == 0) throw std::invalid_argument("FactoryConfig: max_coins must be positive");
  if (max_proposals == 0) throw std::invalid_argument("FactoryConfig: max_proposals must be positive");
}

double rising_factorial_log(double a, std::uint64_t k) {
  if (!(a > 0.0)) throw std::invalid_argument("rising_factorial_log: a must be positive");
  if (k <= 32) {
    double total = 0.0;
    for (std::uint64_t i = 0; i < k; ++i) total += std::log(a + static_cast<double>(i));
    return total;
  }
  return std::lgamma(a + static_cast<double>(k)) - std::lgamma(a);
}

double acceptance_prob(std::uint64_t w, double r) {
  if (!(std::isfinite(r) && r > 0.0)) throw std::invalid_argument("acceptance_prob: r must be positive");
  const double upper = std::ceil(r);
  if (w == 0 || r == upper) return 1.0;
  return std::exp(rising_factorial_log(r, w) - rising_factorial_log(upper, w));
}

SupportIndex support_index(BernoulliArraySource& array, std::uint64_t n, std::uint64_t width) {
  std::vector<SimplePointProcess> columns;
  columns.reserve(width);
  for (std::uint64_t m = 1; m <= width; ++m) columns.push_back(array.get(n, m));
  return {support_union(columns)};
}

MultisetPointProcess nb_urn_row(BernoulliArraySource& array, std::uint64_t n, std::uint64_t r,
                                std::uint64_t max_coins, RowStats* stats) {
  if (r == 0) throw std::invalid_argument("nb_urn_row: r must be at least 1");
  const auto support = support_index(array, n, r);
  std::vector<MultisetEntry> entries;
  entries.reserve(support.kappa());
  for (double s : support.atoms.atoms()) {
    CoinStream coins(array, n, Location{s});
    std::uint64_t count = 0;
    try {
      count = urn_count_single_atom(coins, r, max_coins);
    } catch (const CoinBudgetExceeded& e) {
      throw CoinBudgetExceeded(e.what() + atom_context(n, Location{s}));
    } catch (const CacheBudgetExceeded& e) {
      throw CacheBudgetExceeded(e.what() + atom_context(n, Location{s}));
    }
    if (stats) {
      stats->coins += coins.consumed();
      ++stats->proposals;
    }
    entries.push_back({Location{s}, count});
  }
  if (stats) stats->support += support.kappa();
  return MultisetPointProcess(std::move(entries));
}

MultisetPointProcess nb_row_fractional(BernoulliArraySource& array, std::uint64_t n,
                                       const FactoryConfig& cfg, Rng& uniforms, RowStats* stats) {
  cfg.validate();
  const auto support = support_index(array, n, cfg.ceil_r());
  std::vector<MultisetEntry> entries;
  entries.reserve(support.kappa());
  for (double s : support.atoms.atoms()) {
    CoinStream coins(array, n, Location{s});
    FactoryDraw draw;
    try {
      draw = nb_factory(coins, cfg, uniforms);
    } catch (const CoinBudgetExceeded& e) {
      throw CoinBudgetExceeded(e.what() + atom_context(n, Location{s}));
    } catch (const ProposalBudgetExceeded& e) {
      throw ProposalBudgetExceeded(e.what() + atom_context(n, Location{s}));
    } catch (const CacheBudgetExceeded& e) {
      throw CacheBudgetExceeded(e.what() + atom_context(n, Location{s}));
    }
    if (stats) {
      stats->coins += draw.coins;
      stats->proposals += draw.proposals;
    }
    entries.push_back({Location{s}, draw.value});
  }
  if (stats) stats->support += support.kappa();
  return MultisetPointProcess(std::move(entries));
}

NegativeBinomialSequence::NegativeBinomialSequence(std::unique_ptr<BernoulliSequenceSource> source,
                                                   FactoryConfig cfg, Rng uniforms,
                                                   std::uint64_t max_cached)
    : array_(std::move(source), max_cached), cfg_(cfg), uniforms_(uniforms) {
  cfg_.validate();
}

MultisetPointProcess NegativeBinomialSequence::next(RowStats* stats) {
  ++row_;
  if (cfg_.integer_r()) return nb_urn_row(array_, row_, cfg_.ceil_r(), cfg_.max_coins, stats);
  return nb_row_fractional(array_, row_, cfg_, uniforms_, stats);
}

}  // namespace nbp
