#include "prodwalk/error.hpp"

namespace prodwalk {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NegativeValue: return "NegativeValue";
    case ErrorCode::NonpositiveProbability: return "NonpositiveProbability";
    case ErrorCode::ProbabilitySumMismatch: return "ProbabilitySumMismatch";
    case ErrorCode::MeanNotOne: return "MeanNotOne";
    case ErrorCode::DegenerateDistribution: return "DegenerateDistribution";
    case ErrorCode::NoFiniteTruncation: return "NoFiniteTruncation";
    case ErrorCode::LambdaOutOfRange: return "LambdaOutOfRange";
    case ErrorCode::NonpositiveMu: return "NonpositiveMu";
    case ErrorCode::ProfileEpsMismatch: return "ProfileEpsMismatch";
    case ErrorCode::EpsTooLarge: return "EpsTooLarge";
    case ErrorCode::KOverflow: return "KOverflow";
    case ErrorCode::TruncationInvalid: return "TruncationInvalid";
    case ErrorCode::InvalidK: return "InvalidK";
    case ErrorCode::EnumerationTooLarge: return "EnumerationTooLarge";
    case ErrorCode::NotFiniteSupport: return "NotFiniteSupport";
    case ErrorCode::ZeroCoefficients: return "ZeroCoefficients";
    case ErrorCode::NTooLarge: return "NTooLarge";
    case ErrorCode::RatioTooSmall: return "RatioTooSmall";
    case ErrorCode::NotIncreasing: return "NotIncreasing";
    case ErrorCode::NonpositiveEntry: return "NonpositiveEntry";
    case ErrorCode::CoefficientLengthMismatch: return "CoefficientLengthMismatch";
    case ErrorCode::GridOverflow: return "GridOverflow";
    case ErrorCode::OracleUnavailable: return "OracleUnavailable";
    case ErrorCode::InfeasibleConstraints: return "InfeasibleConstraints";
    case ErrorCode::SchemaError: return "SchemaError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

} // namespace prodwalk
