#pragma once

#include <stdexcept>
#include <string>

namespace bsl {

/// Invalid user input: malformed model, graph, or arguments.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A computation would exceed its configured time or memory budget.
class BudgetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical or structural invariant failed at runtime (zero normalizer,
/// missing table entry, mass check out of tolerance).
class InvariantError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bsl
