#pragma once

#include <stdexcept>
#include <string>

namespace nbp {

/// A finite budget ran out before an a.s.-terminating loop finished.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The coin stream of one atom did not deliver enough failures.
class CoinBudgetExceeded : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

/// The negative binomial factory rejected too many proposals.
class ProposalBudgetExceeded : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

/// The array view would have to cache more sequence elements than allowed.
class CacheBudgetExceeded : public BudgetExceeded {
 public:
  using BudgetExceeded::BudgetExceeded;
};

/// Two independently drawn locations compared equal.
class LocationCollision : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace nbp
