#include "flashsim/error.hpp"

namespace flashsim {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
        case ErrorCode::ZeroDimension: return "ZeroDimension";
        case ErrorCode::Overflow: return "Overflow";
        case ErrorCode::AddressRange: return "AddressRange";
        case ErrorCode::SyntaxError: return "SyntaxError";
        case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
        case ErrorCode::UnboundEvent: return "UnboundEvent";
        case ErrorCode::NegativeResult: return "NegativeResult";
        case ErrorCode::NonFinite: return "NonFinite";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::TraceError: return "TraceError";
        case ErrorCode::MissingSection: return "MissingSection";
        case ErrorCode::UnknownKey: return "UnknownKey";
        case ErrorCode::BadValue: return "BadValue";
        case ErrorCode::ValidationFailed: return "ValidationFailed";
    }
    return "Unknown";
}

}  // namespace flashsim
