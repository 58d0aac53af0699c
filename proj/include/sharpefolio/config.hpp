#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/backtest.hpp"
#include "sharpefolio/market_data.hpp"

namespace sharpefolio {

struct DataConfig {
    std::filesystem::path path;
    PanelFormat format = PanelFormat::csv;
    double max_missing_frac = 0.1;
    double min_adv = 0.0;
};

struct FrontierConfig {
    std::size_t points = 20;
    double lambda_min = 0.1;
    double lambda_max = 1000.0;
    UniverseMode universe = UniverseMode::screened;
};

/// Everything one invocation needs. `backtest.selection`, `backtest.optimizer` and
/// `backtest.risk` are the single source for those sections.
struct GlobalConfig {
    DataConfig data;
    BacktestConfig backtest;
    /// Risk control for the three benchmark runs.
    bool benchmark_risk = false;
    GpConfig gp;
    FrontierConfig frontier;
    std::filesystem::path output_dir = "out";
    std::uint64_t seed = 42;

    void validate() const;
};

/// Environment variable that overrides `output_dir` (a `--output-dir` flag wins over it).
inline constexpr const char* kOutputDirEnv = "SHARPEFOLIO_OUTPUT_DIR";

/// Parses an INI-style file. Relative data paths resolve against the file's directory.
/// Raises ConfigInvalid naming the offending key or value.
GlobalConfig load_config(const std::filesystem::path& path);
GlobalConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});

/// Loads and cleans the configured panel.
PricePanel load_configured_panel(const GlobalConfig& cfg, Diagnostics* diag = nullptr);

} // namespace sharpefolio
