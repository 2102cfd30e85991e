#pragma once

#include <stdexcept>
#include <string>

namespace fecm {

/// Violated precondition of an operation (bad sizes, mismatched records).
class ContractError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Input value outside the mathematical domain of a transform (e.g. log of a
/// non-positive number).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Singular or degenerate numerical problem.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid or incomplete configuration / metadata.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Requested dimension is not covered by an embedded table.
class UnsupportedDimension : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

}  // namespace fecm
