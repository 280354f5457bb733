#include "nbp/measures.hpp"

#include <algorithm>
#include <cmath>
#include <iterator>
#include <stdexcept>

namespace nbp {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

// Integral of (1 - exp(-f)) against Lebesgue measure on [0, 1].
double lebesgue_integral_one_minus_exp(const StepFunction& f) {
  const auto bp = f.breakpoints();
  const auto vals = f.values();
  double total = 0.0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    total += -std::expm1(-vals[i]) * (bp[i + 1] - bp[i]);
  }
  return total;
}

}  // namespace

BaseMeasureSpec::BaseMeasureSpec(std::vector<FixedAtom> atoms, double diffuse_mass)
    : atoms_(std::move(atoms)), diffuse_mass_(diffuse_mass) {
  require(std::isfinite(diffuse_mass_) && diffuse_mass_ >= 0.0,
          "BaseMeasureSpec: diffuse mass must be finite and non-negative");
  for (const auto& atom : atoms_) {
    require(in_unit_interval(atom.location.value), "BaseMeasureSpec: atom location outside [0, 1]");
    require(atom.mass > 0.0 && atom.mass < 1.0, "BaseMeasureSpec: atom mass must lie in (0, 1)");
  }
  std::sort(atoms_.begin(), atoms_.end(),
            [](const FixedAtom& a, const FixedAtom& b) { return a.location < b.location; });
  const auto dup = std::adjacent_find(
      atoms_.begin(), atoms_.end(),
      [](const FixedAtom& a, const FixedAtom& b) { return a.location == b.location; });
  require(dup == atoms_.end(), "BaseMeasureSpec: duplicate atom location");
}

double BaseMeasureSpec::total_mass() const {
  double total = diffuse_mass_;
  for (const auto& atom : atoms_) total += atom.mass;
  return total;
}

SimplePointProcess::SimplePointProcess(std::vector<double> atoms) : atoms_(std::move(atoms)) {
  require(std::all_of(atoms_.begin(), atoms_.end(), in_unit_interval),
          "SimplePointProcess: location outside [0, 1]");
  std::sort(atoms_.begin(), atoms_.end());
  require(std::adjacent_find(atoms_.begin(), atoms_.end()) == atoms_.end(),
          "SimplePointProcess: duplicate location");
}

bool SimplePointProcess::contains(Location s) const {
  return std::binary_search(atoms_.begin(), atoms_.end(), s.value);
}

MultisetPointProcess::MultisetPointProcess(std::vector<MultisetEntry> entries) {
  std::erase_if(entries, [](const MultisetEntry& e) { return e.multiplicity == 0; });
  for (const auto& e : entries) {
    require(in_unit_interval(e.location.value), "MultisetPointProcess: location outside [0, 1]");
  }
  std::sort(entries.begin(), entries.end(),
            [](const MultisetEntry& a, const MultisetEntry& b) { return a.location < b.location; });
  const auto dup = std::adjacent_find(
      entries.begin(), entries.end(),
      [](const MultisetEntry& a, const MultisetEntry& b) { return a.location == b.location; });
  require(dup == entries.end(), "MultisetPointProcess: duplicate location");
  entries_ = std::move(entries);
}

std::uint64_t MultisetPointProcess::at(Location s) const {
  const auto it = std::lower_bound(
      entries_.begin(), entries_.end(), s,
      [](const MultisetEntry& e, Location loc) { return e.location < loc; });
  return (it != entries_.end() && it->location == s) ? it->multiplicity : 0;
}

std::uint64_t MultisetPointProcess::total() const {
  std::uint64_t total = 0;
  for (const auto& e : entries_) total += e.multiplicity;
  return total;
}

MultisetPointProcess as_multiset(const SimplePointProcess& process) {
  std::vector<MultisetEntry> entries;
  entries.reserve(process.size());
  for (double s : process.atoms()) entries.push_back({Location{s}, 1});
  return MultisetPointProcess(std::move(entries));
}

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)) {
  require(breakpoints_.size() >= 2 && values_.size() + 1 == breakpoints_.size(),
          "StepFunction: need one value per piece");
  require(breakpoints_.front() == 0.0 && breakpoints_.back() == 1.0,
          "StepFunction: pieces must cover [0, 1]");
  require(std::adjacent_find(breakpoints_.begin(), breakpoints_.end(),
                             std::greater_equal<>()) == breakpoints_.end(),
          "StepFunction: breakpoints must be strictly increasing");
  require(std::all_of(values_.begin(), values_.end(),
                      [](double v) { return std::isfinite(v) && v >= 0.0; }),
          "StepFunction: values must be finite and non-negative");
}

double StepFunction::operator()(double x) const {
  if (x >= 1.0) return values_.back();
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  const auto piece = std::distance(breakpoints_.begin(), it) - 1;
  return values_[static_cast<std::size_t>(std::max<std::ptrdiff_t>(piece, 0))];
}

std::uint64_t eval_measure(const MultisetPointProcess& process, double a, double b) {
  require(in_unit_interval(a) && in_unit_interval(b) && a <= b,
          "eval_measure: need 0 <= a <= b <= 1");
  std::uint64_t total = 0;
  for (const auto& e : process.entries()) {
    if (e.location.value >= a && e.location.value <= b) total += e.multiplicity;
  }
  return total;
}

double integral_against(const MultisetPointProcess& process, const StepFunction& f) {
  double total = 0.0;
  for (const auto& e : process.entries()) {
    total += static_cast<double>(e.multiplicity) * f(e.location.value);
  }
  return total;
}

SimplePointProcess support_union(std::span<const SimplePointProcess> processes) {
  std::vector<double> all;
  for (const auto& p : processes) all.insert(all.end(), p.atoms().begin(), p.atoms().end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return SimplePointProcess(std::move(all));
}

double analytic_laplace_nbp(const BaseMeasureSpec& base, double r, const StepFunction& f) {
  require(std::isfinite(r) && r > 0.0, "analytic_laplace_nbp: r must be positive");
  double log_value = -r * base.diffuse_mass() * lebesgue_integral_one_minus_exp(f);
  for (const auto& atom : base.fixed_atoms()) {
    const double b = atom.mass;
    const double fs = f(atom.location.value);
    log_value += r * (std::log1p(-b) - std::log1p(-b * std::exp(-fs)));
  }
  return std::exp(log_value);
}

double analytic_laplace_bep(const BaseMeasureSpec& base, const StepFunction& f) {
  double log_value = -base.diffuse_mass() * lebesgue_integral_one_minus_exp(f);
  for (const auto& atom : base.fixed_atoms()) {
    const double fs = f(atom.location.value);
    log_value += std::log1p(atom.mass * std::expm1(-fs));
  }
  return std::exp(log_value);
}

}  // namespace nbp
