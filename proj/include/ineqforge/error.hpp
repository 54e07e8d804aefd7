#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ineqforge {

enum class ErrorKind {
    ParseError,
    InvalidSupport,
    NonIntegrablePotential,
    OutOfRange,
    NullSet,
    BadAlpha,
    WindowTooSmall,
    DomainError,
    ZeroMass,
    SingularRatio,
    ZeroFunction,
    MassMismatch,
    NonSmoothInput,
    DivergentIntegral,
    SlopeViolation,
    MedianNotZero,
    NegativeConstant,
    DivisionByZero,
    EmptyFamily,
    IntegrationError,
    BlowUp,
    ConfigError,
};

inline std::string_view to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::InvalidSupport: return "InvalidSupport";
        case ErrorKind::NonIntegrablePotential: return "NonIntegrablePotential";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NullSet: return "NullSet";
        case ErrorKind::BadAlpha: return "BadAlpha";
        case ErrorKind::WindowTooSmall: return "WindowTooSmall";
        case ErrorKind::DomainError: return "DomainError";
        case ErrorKind::ZeroMass: return "ZeroMass";
        case ErrorKind::SingularRatio: return "SingularRatio";
        case ErrorKind::ZeroFunction: return "ZeroFunction";
        case ErrorKind::MassMismatch: return "MassMismatch";
        case ErrorKind::NonSmoothInput: return "NonSmoothInput";
        case ErrorKind::DivergentIntegral: return "DivergentIntegral";
        case ErrorKind::SlopeViolation: return "SlopeViolation";
        case ErrorKind::MedianNotZero: return "MedianNotZero";
        case ErrorKind::NegativeConstant: return "NegativeConstant";
        case ErrorKind::DivisionByZero: return "DivisionByZero";
        case ErrorKind::EmptyFamily: return "EmptyFamily";
        case ErrorKind::IntegrationError: return "IntegrationError";
        case ErrorKind::BlowUp: return "BlowUp";
        case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace ineqforge
