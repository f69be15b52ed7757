#pragma once

#include <stdexcept>
#include <string>

namespace lossprobe {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// A numerical routine produced a result that violates its own tolerance
/// (negative discriminant, residual too large, unphysical intermediate).
class NumericalError : public std::runtime_error {
public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// A covariance matrix is not a valid quantum state.
class UnphysicalStateError : public NumericalError {
public:
  explicit UnphysicalStateError(const std::string& what) : NumericalError(what) {}
};

/// Truncated Fock representation lost more probability mass than allowed,
/// or an explicit tensor power would exceed the configured dimension cap.
class TruncationError : public std::runtime_error {
public:
  explicit TruncationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace lossprobe
