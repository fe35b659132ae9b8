#pragma once

#include <stdexcept>
#include <string>

namespace nsm {

// Argument outside the mathematical domain of an operation (negative tau, t > T, ...).
class DomainError : public std::domain_error {
   public:
    using std::domain_error::domain_error;
};

// Design matrix too close to rank deficiency for a trustworthy least-squares solve.
class IllConditionedError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

// Basis is not closed under d/dtau (e.g. a linear term without the constant).
class UnsupportedBasisError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Model parameters that collapse the forward-curve basis (Hull-White with lambda in {a, 2a}).
class DegenerateParametersError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

// Malformed external input (CSV, JSON). Carries a human-readable location.
class InputError : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

}  // namespace nsm
