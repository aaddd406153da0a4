#pragma once

#include <stdexcept>
#include <string>

namespace ergoscope {

enum class ErrorKind {
    PrecisionExhausted,
    DepthExceeded,
    EmptyInput,
    OutOfRange,
    SingularOrbit,
    InvalidParams,
    SingularityHit,
    OrderUnsupported,
    GridTooCoarse,
    NonPositiveLength,
    OutOfDomain,
    DegenerateStep,
    InconsistentRecord,
    NotFound,
    InvariantViolated,
    PermutationMismatch,
    BetaInForbiddenRegion,
    MassMismatch,
    DegenerateSupport,
    ZeroScale,
    SubProbability,
    IoError,
    ConfigError,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what);
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace ergoscope
