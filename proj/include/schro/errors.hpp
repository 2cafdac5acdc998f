#pragma once

#include <stdexcept>
#include <string>

namespace schro {

// Invalid input: bad mesh parameters, malformed files, size mismatches.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A numerical routine could not produce a trustworthy answer.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Symmetric factorization hit an exactly zero pivot; retry with a perturbed shift.
class FactorizationBreakdown : public NumericalError {
public:
    FactorizationBreakdown(const std::string& what, int pivot) : NumericalError(what), pivot_(pivot) {}
    int pivot() const noexcept { return pivot_; }

private:
    int pivot_;
};

// Optimizer started from (or reached) a point violating lambda_k >= 0.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace schro
