#pragma once

#include <stdexcept>
#include <string>

namespace pairclust {

/// Error taxonomy shared across the library. Each code maps to a process
/// exit code so the CLI can report failures in a machine-parsable way.
enum class ErrorCode {
    InvalidArgument,
    ZeroNormRow,
    KTooLarge,
    UnknownBackend,
    WeightingMismatch,
    LengthMismatch,
    IndexOutOfRange,
    SameIndex,
    SingleClass,
    DimMismatch,
    ModelMismatch,
    NonFiniteLoss,
    CentroidSamplingFailed,
    FormatError,
    IoError,
};

const char* error_code_name(ErrorCode code);

/// Exit code classes: 2 = data/validation error, 3 = runtime failure.
/// (Exit 1 is reserved for command-line usage errors.)
int error_exit_code(ErrorCode code);

class PcError : public std::runtime_error {
public:
    PcError(ErrorCode code, std::string detail)
        : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
          code_(code),
          detail_(std::move(detail)) {}

    ErrorCode code() const { return code_; }
    const std::string& detail() const { return detail_; }
    const char* code_name() const { return error_code_name(code_); }
    int exit_code() const { return error_exit_code(code_); }

private:
    ErrorCode code_;
    std::string detail_;
};

}  // namespace pairclust
