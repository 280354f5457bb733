#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <vector>

namespace nbp {

/// A point of the ground space [0, 1]. Identity is exact equality.
struct Location {
  double value = 0.0;

  friend auto operator<=>(const Location&, const Location&) = default;
};

struct FixedAtom {
  Location location;
  double mass = 0.0;

  friend bool operator==(const FixedAtom&, const FixedAtom&) = default;
};

/**
 * A deterministic base measure on [0, 1]: finitely many fixed atoms with
 * masses in (0, 1) plus a diffuse part `diffuse_mass * Uniform[0, 1]`.
 *
 * Construction validates and sorts the atoms by location; invalid input
 * throws std::invalid_argument.
 */
class BaseMeasureSpec {
 public:
  BaseMeasureSpec() = default;
  BaseMeasureSpec(std::vector<FixedAtom> atoms, double diffuse_mass);

  static BaseMeasureSpec diffuse(double mass) { return {{}, mass}; }

  const std::vector<FixedAtom>& fixed_atoms() const { return atoms_; }
  double diffuse_mass() const { return diffuse_mass_; }
  double total_mass() const;

 private:
  std::vector<FixedAtom> atoms_;
  double diffuse_mass_ = 0.0;
};

/// Finite set of distinct locations, kept sorted.
class SimplePointProcess {
 public:
  SimplePointProcess() = default;
  /// Sorts; throws std::invalid_argument on duplicates or points outside [0, 1].
  explicit SimplePointProcess(std::vector<double> atoms);

  std::span<const double> atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  bool contains(Location s) const;

  friend bool operator==(const SimplePointProcess&, const SimplePointProcess&) = default;

 private:
  std::vector<double> atoms_;
};

struct MultisetEntry {
  Location location;
  std::uint64_t multiplicity = 0;

  friend bool operator==(const MultisetEntry&, const MultisetEntry&) = default;
};

/// Finite multiset on [0, 1]: sorted distinct locations with multiplicity >= 1.
/// Locations with multiplicity zero are simply not stored.
class MultisetPointProcess {
 public:
  MultisetPointProcess() = default;
  /// Sorts, drops zero multiplicities; throws on duplicate locations.
  explicit MultisetPointProcess(std::vector<MultisetEntry> entries);

  std::span<const MultisetEntry> entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  /// Multiplicity at s (0 when absent).
  std::uint64_t at(Location s) const;
  std::uint64_t total() const;

  friend bool operator==(const MultisetPointProcess&, const MultisetPointProcess&) = default;

 private:
  std::vector<MultisetEntry> entries_;
};

/// Every simple process is a multiset with unit multiplicities.
MultisetPointProcess as_multiset(const SimplePointProcess& process);

/**
 * Non-negative step function on [0, 1].
 *
 * `breakpoints` runs 0 = b_0 < b_1 < ... < b_k = 1 and piece i takes
 * `values[i]` on [b_i, b_{i+1}); the last piece also covers 1.
 */
class StepFunction {
 public:
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  static StepFunction constant(double value) { return {{0.0, 1.0}, {value}}; }

  double operator()(double x) const;
  std::span<const double> breakpoints() const { return breakpoints_; }
  std::span<const double> values() const { return values_; }

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// X([a, b]). Throws std::invalid_argument unless 0 <= a <= b <= 1.
std::uint64_t eval_measure(const MultisetPointProcess& process, double a, double b);

/// X(f) = sum of multiplicity * f(location).
double integral_against(const MultisetPointProcess& process, const StepFunction& f);

/// Sorted union of supports.
SimplePointProcess support_union(std::span<const SimplePointProcess> processes);

/// E exp(-X(f)) for X ~ NBP(r, base).
double analytic_laplace_nbp(const BaseMeasureSpec& base, double r, const StepFunction& f);

/// E exp(-Y(f)) for Y ~ BeP(base).
double analytic_laplace_bep(const BaseMeasureSpec& base, const StepFunction& f);

}  // namespace nbp
