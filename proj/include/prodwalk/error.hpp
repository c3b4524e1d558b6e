#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace prodwalk {

enum class ErrorCode {
    InvalidArgument,
    NegativeValue,
    NonpositiveProbability,
    ProbabilitySumMismatch,
    MeanNotOne,
    DegenerateDistribution,
    NoFiniteTruncation,
    LambdaOutOfRange,
    NonpositiveMu,
    ProfileEpsMismatch,
    EpsTooLarge,
    KOverflow,
    TruncationInvalid,
    InvalidK,
    EnumerationTooLarge,
    NotFiniteSupport,
    ZeroCoefficients,
    NTooLarge,
    RatioTooSmall,
    NotIncreasing,
    NonpositiveEntry,
    CoefficientLengthMismatch,
    GridOverflow,
    OracleUnavailable,
    InfeasibleConstraints,
    SchemaError,
    IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures surface as this exception; `code()` is the stable,
// machine-readable part that ends up in CLI reports.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    [[nodiscard]] ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

#define PRODWALK_REQUIRE(cond, code, msg)                  \
    do {                                                   \
        if (!(cond)) throw ::prodwalk::Error((code), (msg)); \
    } while (false)

} // namespace prodwalk
