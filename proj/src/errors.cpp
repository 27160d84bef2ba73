#include "gaussmet/errors.hpp"

namespace gaussmet {

const char* to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::NotHermitian: return "NotHermitian";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::NotUnitary: return "NotUnitary";
    case ErrorCode::NotPSD: return "NotPSD";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ModesNotOrthonormal: return "ModesNotOrthonormal";
    case ErrorCode::SpectrumUnreachable: return "SpectrumUnreachable";
    case ErrorCode::ConditionViolated: return "ConditionViolated";
    case ErrorCode::NoIdlerModes: return "NoIdlerModes";
    case ErrorCode::StateNotEigenbasisDiagonal: return "StateNotEigenbasisDiagonal";
    case ErrorCode::ConditionNotVerified: return "ConditionNotVerified";
    case ErrorCode::TailTooLarge: return "TailTooLarge";
    case ErrorCode::TooManyModes: return "TooManyModes";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::RegularizationPoor: return "RegularizationPoor";
    case ErrorCode::FitIllConditioned: return "FitIllConditioned";
    case ErrorCode::NumericalInstability: return "NumericalInstability";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

}  // namespace gaussmet
