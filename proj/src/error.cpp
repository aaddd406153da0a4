#include "ergoscope/error.hpp"

namespace ergoscope {

const char* error_kind_name(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::PrecisionExhausted: return "PrecisionExhausted";
        case ErrorKind::DepthExceeded: return "DepthExceeded";
        case ErrorKind::EmptyInput: return "EmptyInput";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::SingularOrbit: return "SingularOrbit";
        case ErrorKind::InvalidParams: return "InvalidParams";
        case ErrorKind::SingularityHit: return "SingularityHit";
        case ErrorKind::OrderUnsupported: return "OrderUnsupported";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::NonPositiveLength: return "NonPositiveLength";
        case ErrorKind::OutOfDomain: return "OutOfDomain";
        case ErrorKind::DegenerateStep: return "DegenerateStep";
        case ErrorKind::InconsistentRecord: return "InconsistentRecord";
        case ErrorKind::NotFound: return "NotFound";
        case ErrorKind::InvariantViolated: return "InvariantViolated";
        case ErrorKind::PermutationMismatch: return "PermutationMismatch";
        case ErrorKind::BetaInForbiddenRegion: return "BetaInForbiddenRegion";
        case ErrorKind::MassMismatch: return "MassMismatch";
        case ErrorKind::DegenerateSupport: return "DegenerateSupport";
        case ErrorKind::ZeroScale: return "ZeroScale";
        case ErrorKind::SubProbability: return "SubProbability";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(error_kind_name(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ergoscope
