#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace seedstab {

enum class ErrorCode {
    MissingColumn,
    NonDailyGap,
    DuplicateCell,
    EmptyFile,
    SplitOutOfRange,
    InvalidConfig,
    InsufficientHistory,
    TrainingDiverged,
    EmptyGrid,
    LengthMismatch,
    NonFiniteInput,
    EmptySample,
    ShapeMismatch,
    EmptyInput,
    ProbOutOfRange,
    EmptyExperiment,
    IoError,
    SchemaMismatch,
    RaggedRuns,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI in particular) can branch without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace seedstab
