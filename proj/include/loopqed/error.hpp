#pragma once

#include <stdexcept>
#include <string>

namespace loopqed {

/// Raised when an argument lies outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Raised when a numerical procedure fails to reach its requested tolerance.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

}  // namespace loopqed
