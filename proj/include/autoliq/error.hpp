#pragma once

#include <stdexcept>
#include <string>

namespace autoliq {

/// Argument outside the mathematical domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

/// A numerical method failed to produce a result (bracketing, convergence,
/// path generation).
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BracketError : NumericalError {
    using NumericalError::NumericalError;
};

struct ConvergenceError : NumericalError {
    using NumericalError::NumericalError;
};

/// Path generation method failure; `method()` names the generator.
class GenerationError : public NumericalError {
public:
    GenerationError(std::string method, const std::string& what)
        : NumericalError(method + ": " + what), method_(std::move(method)) {}

    const std::string& method() const noexcept { return method_; }

private:
    std::string method_;
};

/// Liquidity add/remove amounts not in the pool's reserve ratio.
struct RatioMismatchError : DomainError {
    using DomainError::DomainError;
};

/// Carnot-cycle transition invoked from the wrong stage.
struct StageOrderError : std::logic_error {
    using std::logic_error::logic_error;
};

namespace detail {

inline void require(bool ok, const std::string& message) {
    if (!ok) throw DomainError(message);
}

}  // namespace detail
}  // namespace autoliq
