#pragma once

#include <stdexcept>
#include <string>

namespace nilflow {

/// Operands of incompatible dimension (matrix sizes, lattice point lengths).
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A summation, search or refinement loop hit its configured cap.
class BudgetExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed textual input (words, PL maps, JSON configs).
class ParseError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace nilflow
