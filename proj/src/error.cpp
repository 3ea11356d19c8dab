#include "scarlab/error.hpp"

namespace scarlab {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::GridMismatch: return "GridMismatch";
        case ErrorCode::GridTooSmall: return "GridTooSmall";
        case ErrorCode::GridTooCoarse: return "GridTooCoarse";
        case ErrorCode::NonConvergence: return "NonConvergence";
        case ErrorCode::ProblemTooLarge: return "ProblemTooLarge";
        case ErrorCode::FitFailure: return "FitFailure";
        case ErrorCode::WindowTooShort: return "WindowTooShort";
        case ErrorCode::SeriesTooShort: return "SeriesTooShort";
        case ErrorCode::SeriesDegenerate: return "SeriesDegenerate";
        case ErrorCode::SpectrumTooShort: return "SpectrumTooShort";
        case ErrorCode::IncompleteExpansion: return "IncompleteExpansion";
        case ErrorCode::BasisNotOrthonormal: return "BasisNotOrthonormal";
        case ErrorCode::UnsupportedPotential: return "UnsupportedPotential";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace scarlab
