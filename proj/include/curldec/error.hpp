#pragma once

#include <stdexcept>
#include <string>

namespace curldec {

enum class ErrorCode {
    // usage / configuration
    InvalidArgument,
    UnknownKey,
    BadConfig,
    // data / file problems
    IoError,
    MalformedHeader,
    MalformedNumber,
    NonMonotoneTime,
    NonUniformSampling,
    NonFiniteValue,
    InconsistentRowWidth,
    EmptyRecord,
    TooFewRows,
    OutOfRangeAngle,
    UnsupportedRatio,
    InvalidCutoff,
    InsufficientLength,
    InconsistentPyramid,
    InvalidDegree,
    OutsideCap,
    ShapeMismatch,
    NoWindows,
    TooFewGroups,
    WindowTooShort,
    DuplicateKey,
    // numeric failures
    DegenerateChannel,
    DegenerateSeries,
    IllConditionedMontage,
    NoGraph,
    NonFiniteGradient,
    NonFiniteLoss,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

    ErrorCode code() const { return code_; }

    // Process exit class: 1 usage, 2 data, 3 numeric failure.
    int exit_class() const {
        switch (code_) {
            case ErrorCode::InvalidArgument:
            case ErrorCode::UnknownKey:
            case ErrorCode::BadConfig:
                return 1;
            case ErrorCode::DegenerateChannel:
            case ErrorCode::DegenerateSeries:
            case ErrorCode::IllConditionedMontage:
            case ErrorCode::NoGraph:
            case ErrorCode::NonFiniteGradient:
            case ErrorCode::NonFiniteLoss:
                return 3;
            default:
                return 2;
        }
    }

private:
    ErrorCode code_;
};

}  // namespace curldec
