#pragma once

#include <stdexcept>
#include <string>

namespace avgrl {

enum class ErrorKind {
    // model / input validation
    NonStochasticRow,
    DanglingState,
    EmptyModel,
    UnknownName,
    ConfigInvalid,
    PreconditionViolation,
    NotWeaklyCommunicating,
    ZeroBehaviorProb,
    IoFailure,
    // numerical
    NonProperOption,
    SingularSolve,
    NoConvergence,
    NonFiniteUpdate,
    NonPositiveLength,
    StepLimitExceeded,
    EnumerationOverflow,
};

const char* to_string(ErrorKind kind) noexcept;

/// True for errors that stem from numerical failure rather than bad input.
bool is_numerical(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace avgrl
