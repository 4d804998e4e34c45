#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace flashsim {

enum class ErrorCode {
    // topology
    ZeroDimension,
    Overflow,
    AddressRange,
    // models / expressions
    SyntaxError,
    UnknownIdentifier,
    UnboundEvent,
    NegativeResult,
    NonFinite,
    DivisionByZero,
    // trace / config
    TraceError,
    MissingSection,
    UnknownKey,
    BadValue,
    // engine
    ValidationFailed,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace flashsim
