#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sharpefolio/config.hpp"

namespace sharpefolio {

struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::filesystem::path> output_dir;
};

/// Loads the config, then applies the output-dir environment variable and the flags, flags last.
GlobalConfig resolve_config(const std::filesystem::path& config_path, const Overrides& overrides);

/// The configured strategy, then the remaining strategies as benchmarks, in `kAllStrategies` order.
std::vector<std::pair<std::string, BacktestReport>> run_strategy_suite(const PricePanel& panel,
                                                                       const GlobalConfig& cfg);

/// Each command writes its reports, prints failures to `err`, and returns the exit code.
int cmd_backtest(const GlobalConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_select(const GlobalConfig& cfg, const std::string& date, std::ostream& out, std::ostream& err);
int cmd_frontier(const GlobalConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_evolve(const GlobalConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_metrics(const std::filesystem::path& equity_csv, std::ostream& out, std::ostream& err);

/// Runs `body` and maps any escaping error onto the documented exit code.
template <class F>
int guarded(std::ostream& err, F&& body);

} // namespace sharpefolio

#include "sharpefolio/detail/guarded.hpp"
