#pragma once

#include <stdexcept>
#include <string>

namespace covsim {

/// Caller broke a documented precondition (u outside [0,1], stepping a
/// finished episode, ...).
class ContractViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// |p'(u)| fell below the degeneracy threshold.
class DegenerateCurveError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The constant-speed time law ran past u = 1 before the requested duration.
class ParameterOverflowError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class GenerationFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Rejection sampling hit max_tries without a feasible action.
class SamplingExhausted : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An invariant the library itself should guarantee did not hold.
class InternalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace covsim
