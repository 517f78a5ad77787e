#include "pairclust/error.hpp"

namespace pairclust {

const char* error_code_name(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroNormRow: return "ZeroNormRow";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::UnknownBackend: return "UnknownBackend";
        case ErrorCode::WeightingMismatch: return "WeightingMismatch";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SameIndex: return "SameIndex";
        case ErrorCode::SingleClass: return "SingleClass";
        case ErrorCode::DimMismatch: return "DimMismatch";
        case ErrorCode::ModelMismatch: return "ModelMismatch";
        case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
        case ErrorCode::CentroidSamplingFailed: return "CentroidSamplingFailed";
        case ErrorCode::FormatError: return "FormatError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

int error_exit_code(ErrorCode code) {
    switch (code) {
        case ErrorCode::NonFiniteLoss:
        case ErrorCode::CentroidSamplingFailed:
        case ErrorCode::IoError:
            return 3;
        default:
            return 2;
    }
}

}  // namespace pairclust
