#include "seedstab/error.hpp"

namespace seedstab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::NonDailyGap: return "NonDailyGap";
    case ErrorCode::DuplicateCell: return "DuplicateCell";
    case ErrorCode::EmptyFile: return "EmptyFile";
    case ErrorCode::SplitOutOfRange: return "SplitOutOfRange";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::TrainingDiverged: return "TrainingDiverged";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::NonFiniteInput: return "NonFiniteInput";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::ProbOutOfRange: return "ProbOutOfRange";
    case ErrorCode::EmptyExperiment: return "EmptyExperiment";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::RaggedRuns: return "RaggedRuns";
    }
    return "Unknown";
}

} // namespace seedstab
