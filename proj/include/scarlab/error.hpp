#pragma once

#include <stdexcept>
#include <string>

namespace scarlab {

enum class ErrorCode {
    ConfigError,
    DomainError,
    GridMismatch,
    GridTooSmall,
    GridTooCoarse,
    NonConvergence,
    ProblemTooLarge,
    FitFailure,
    WindowTooShort,
    SeriesTooShort,
    SeriesDegenerate,
    SpectrumTooShort,
    IncompleteExpansion,
    BasisNotOrthonormal,
    UnsupportedPotential,
    IoError,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& msg)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + msg), code_(code) {}

    ErrorCode code() const { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) { throw Error(code, msg); }

inline void require(bool cond, ErrorCode code, const std::string& msg) {
    if (!cond) fail(code, msg);
}

// Exit statuses for the command line tool: estimator failures are recoverable
// (other estimators still run), solver and configuration failures are not.
inline int exit_status_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::FitFailure:
        case ErrorCode::WindowTooShort:
        case ErrorCode::SeriesTooShort:
        case ErrorCode::SeriesDegenerate:
        case ErrorCode::SpectrumTooShort:
        case ErrorCode::IncompleteExpansion:
            return 1;
        default:
            return 2;
    }
}

}  // namespace scarlab
