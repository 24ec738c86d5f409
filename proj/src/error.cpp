#include "traderbench/error.hpp"

namespace traderbench {

std::string_view code_name(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::MalformedRow: return "MALFORMED_ROW";
        case ErrorCode::InvariantViolation: return "INVARIANT_VIOLATION";
        case ErrorCode::NonUniformInterval: return "NON_UNIFORM_INTERVAL";
        case ErrorCode::EmptyWindow: return "EMPTY_WINDOW";
        case ErrorCode::TooShort: return "TOO_SHORT";
        case ErrorCode::WindowTooLarge: return "WINDOW_TOO_LARGE";
        case ErrorCode::SeriesTooShort: return "SERIES_TOO_SHORT";
        case ErrorCode::InjectionInfeasible: return "INJECTION_INFEASIBLE";
        case ErrorCode::InvalidParams: return "INVALID_PARAMS";
        case ErrorCode::InvalidCash: return "INVALID_CASH";
        case ErrorCode::InvalidInput: return "INVALID_INPUT";
        case ErrorCode::ZeroVol: return "ZERO_VOL";
        case ErrorCode::PriceOutOfBounds: return "PRICE_OUT_OF_BOUNDS";
        case ErrorCode::NoConvergence: return "NO_CONVERGENCE";
        case ErrorCode::MixedExpiries: return "MIXED_EXPIRIES";
        case ErrorCode::EmptyLegs: return "EMPTY_LEGS";
        case ErrorCode::MissingCondition: return "MISSING_CONDITION";
        case ErrorCode::NoActiveSections: return "NO_ACTIVE_SECTIONS";
        case ErrorCode::DegenerateRange: return "DEGENERATE_RANGE";
        case ErrorCode::EmptyPool: return "EMPTY_POOL";
        case ErrorCode::SimFinished: return "SIM_FINISHED";
        case ErrorCode::InsufficientCash: return "INSUFFICIENT_CASH";
        case ErrorCode::InsufficientPosition: return "INSUFFICIENT_POSITION";
        case ErrorCode::InvalidConfig: return "INVALID_CONFIG";
        case ErrorCode::Io: return "IO_ERROR";
        case ErrorCode::ToolNotFound: return "TOOL_NOT_FOUND";
        case ErrorCode::BadArguments: return "BAD_ARGUMENTS";
        case ErrorCode::Lookahead: return "LOOKAHEAD";
        case ErrorCode::UnknownSymbol: return "UNKNOWN_SYMBOL";
        case ErrorCode::SessionNotFound: return "SESSION_NOT_FOUND";
        case ErrorCode::Timeout: return "TIMEOUT";
        case ErrorCode::MalformedResponse: return "MALFORMED_RESPONSE";
        case ErrorCode::MalformedAnswer: return "MALFORMED_ANSWER";
        case ErrorCode::AgentFailure: return "AGENT_FAILURE";
        case ErrorCode::Internal: return "INTERNAL";
    }
    return "INTERNAL";
}

ErrorCode parse_code(std::string_view name) noexcept {
    for (int i = 0; i <= static_cast<int>(ErrorCode::Internal); ++i) {
        const auto code = static_cast<ErrorCode>(i);
        if (code_name(code) == name) return code;
    }
    return ErrorCode::Internal;
}

}  // namespace traderbench
