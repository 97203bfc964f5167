#pragma once

#include <stdexcept>
#include <string>

namespace g2q {

// A computation outgrew its configured depth/term/step budget. Budgets are
// configurable; exceeding one is always an error, never a truncated result.
class CapExceededError : public std::runtime_error {
 public:
  explicit CapExceededError(const std::string& what)
      : std::runtime_error("CapExceeded: " + what) {}
};

// The character algorithm generated a second dominant monomial: the input
// head does not label a module the algorithm can finish.
class NotSpecialError : public std::runtime_error {
 public:
  explicit NotSpecialError(const std::string& what)
      : std::runtime_error("NotSpecial: " + what) {}
};

// A finished character failed its independent validation (per-node peel).
class InconsistentError : public std::runtime_error {
 public:
  explicit InconsistentError(const std::string& what)
      : std::runtime_error("Inconsistent: " + what) {}
};

// A cluster exchange in value mode did not divide exactly; the seed or the
// claimed identity is wrong.
class InexactDivisionError : public std::runtime_error {
 public:
  explicit InexactDivisionError(const std::string& what)
      : std::runtime_error("InexactDivision: " + what) {}
};

}  // namespace g2q
