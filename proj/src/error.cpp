#include "avgrl/error.hpp"

namespace avgrl {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonStochasticRow: return "NonStochasticRow";
    case ErrorKind::DanglingState: return "DanglingState";
    case ErrorKind::EmptyModel: return "EmptyModel";
    case ErrorKind::UnknownName: return "UnknownName";
    case ErrorKind::ConfigInvalid: return "ConfigInvalid";
    case ErrorKind::PreconditionViolation: return "PreconditionViolation";
    case ErrorKind::NotWeaklyCommunicating: return "NotWeaklyCommunicating";
    case ErrorKind::ZeroBehaviorProb: return "ZeroBehaviorProb";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::NonProperOption: return "NonProperOption";
    case ErrorKind::SingularSolve: return "SingularSolve";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NonFiniteUpdate: return "NonFiniteUpdate";
    case ErrorKind::NonPositiveLength: return "NonPositiveLength";
    case ErrorKind::StepLimitExceeded: return "StepLimitExceeded";
    case ErrorKind::EnumerationOverflow: return "EnumerationOverflow";
    }
    return "Unknown";
}

bool is_numerical(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::NonProperOption:
    case ErrorKind::SingularSolve:
    case ErrorKind::NoConvergence:
    case ErrorKind::NonFiniteUpdate:
    case ErrorKind::NonPositiveLength:
    case ErrorKind::StepLimitExceeded:
    case ErrorKind::EnumerationOverflow:
        return true;
    default:
        return false;
    }
}

} // namespace avgrl
