#pragma once

#include <stdexcept>
#include <string>

namespace robe {

/// Evaluation at (or numerically on top of) the second primary, where r2 = 0.
class SingularityError : public std::domain_error {
public:
    explicit SingularityError(const std::string& what) : std::domain_error(what) {}
};

/// Parameters outside the domain of a closed-form expression.
class DomainError : public std::domain_error {
public:
    explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Input structure an operation relies on is violated (e.g. nonzero coupling terms).
class StructureError : public std::invalid_argument {
public:
    explicit StructureError(const std::string& what) : std::invalid_argument(what) {}
};

/// Iterative method failed (no convergence, singular Jacobian, step underflow).
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace robe
