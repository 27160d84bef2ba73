#pragma once

#include <stdexcept>
#include <string>

namespace gaussmet {

enum class ErrorCode {
    NotHermitian,
    NotSymmetric,
    NonFinite,
    NotUnitary,
    NotPSD,
    DimensionMismatch,
    InvalidArgument,
    ModesNotOrthonormal,
    SpectrumUnreachable,
    ConditionViolated,
    NoIdlerModes,
    StateNotEigenbasisDiagonal,
    ConditionNotVerified,
    TailTooLarge,
    TooManyModes,
    GridTooCoarse,
    RegularizationPoor,
    FitIllConditioned,
    NumericalInstability,
    ParseError,
    IoError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace gaussmet
