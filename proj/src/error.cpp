#include "sharpefolio/error.hpp"

namespace sharpefolio {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigInvalid: return "ConfigInvalid";
    case ErrorCode::MissingFile: return "MissingFile";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::EmptyPanel: return "EmptyPanel";
    case ErrorCode::InsufficientHistory: return "InsufficientHistory";
    case ErrorCode::NoDataAtDate: return "NoDataAtDate";
    case ErrorCode::EmptyUniverse: return "EmptyUniverse";
    case ErrorCode::NoAssets: return "NoAssets";
    case ErrorCode::SingularStats: return "SingularStats";
    case ErrorCode::Infeasible: return "Infeasible";
    case ErrorCode::NotConverged: return "NotConverged";
    case ErrorCode::NonPositiveEquity: return "NonPositiveEquity";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::NonPositiveStart: return "NonPositiveStart";
    case ErrorCode::NonPositiveValues: return "NonPositiveValues";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::EmptySeries: return "EmptySeries";
    case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
    case ErrorCode::InsufficientSample: return "InsufficientSample";
    case ErrorCode::NoDownside: return "NoDownside";
    case ErrorCode::DegenerateBenchmark: return "DegenerateBenchmark";
    case ErrorCode::MalformedTree: return "MalformedTree";
    case ErrorCode::DegenerateSignal: return "DegenerateSignal";
    }
    return "Unknown";
}

ErrorClass classify(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::ConfigInvalid:
        return ErrorClass::Config;
    case ErrorCode::MissingFile:
    case ErrorCode::SchemaViolation:
    case ErrorCode::EmptyPanel:
    case ErrorCode::InsufficientHistory:
    case ErrorCode::NoDataAtDate:
        return ErrorClass::Data;
    default:
        return ErrorClass::Runtime;
    }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

} // namespace sharpefolio
