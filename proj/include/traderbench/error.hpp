#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace traderbench {

/// Every failure the library raises carries one of these codes. The wire
/// layer reports them as upper-snake strings (see code_name()).
enum class ErrorCode {
    MalformedRow,
    InvariantViolation,
    NonUniformInterval,
    EmptyWindow,
    TooShort,
    WindowTooLarge,
    SeriesTooShort,
    InjectionInfeasible,
    InvalidParams,
    InvalidCash,
    InvalidInput,
    ZeroVol,
    PriceOutOfBounds,
    NoConvergence,
    MixedExpiries,
    EmptyLegs,
    MissingCondition,
    NoActiveSections,
    DegenerateRange,
    EmptyPool,
    SimFinished,
    InsufficientCash,
    InsufficientPosition,
    InvalidConfig,
    Io,
    // wire-level codes
    ToolNotFound,
    BadArguments,
    Lookahead,
    UnknownSymbol,
    SessionNotFound,
    Timeout,
    MalformedResponse,
    MalformedAnswer,
    AgentFailure,
    Internal,
};

std::string_view code_name(ErrorCode code) noexcept;
/// Inverse of code_name; unknown names map to Internal.
ErrorCode parse_code(std::string_view name) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace traderbench
