#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace sharpefolio {

enum class ErrorCode {
    // configuration
    ConfigInvalid,
    // data
    MissingFile,
    SchemaViolation,
    EmptyPanel,
    InsufficientHistory,
    NoDataAtDate,
    // runtime
    EmptyUniverse,
    NoAssets,
    SingularStats,
    Infeasible,
    NotConverged,
    NonPositiveEquity,
    IndexOutOfRange,
    NonPositiveStart,
    NonPositiveValues,
    ZeroVariance,
    EmptySeries,
    InsufficientSnapshots,
    InsufficientSample,
    NoDownside,
    DegenerateBenchmark,
    MalformedTree,
    DegenerateSignal,
};

/// Broad failure class; the CLI maps these onto exit codes 1, 2 and 3.
enum class ErrorClass { Config = 1, Data = 2, Runtime = 3 };

std::string_view to_string(ErrorCode code) noexcept;
ErrorClass classify(ErrorCode code) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }
    ErrorClass error_class() const noexcept { return classify(code_); }

private:
    ErrorCode code_;
};

} // namespace sharpefolio
