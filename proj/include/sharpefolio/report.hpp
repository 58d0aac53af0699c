#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/backtest.hpp"
#include "sharpefolio/optimizer.hpp"
#include "sharpefolio/universe.hpp"

namespace sharpefolio {

/// `date,equity,exposure,cost`; the final row carries the closing equity only.
void write_equity_csv(std::ostream& out, const BacktestReport& rep);
/// `date,symbol,weight`, symbols sorted within each date.
void write_weights_csv(std::ostream& out, const BacktestReport& rep);

/// Writes equity.csv, weights.csv, metrics.json and risk.csv into `dir`.
void write_strategy_report(const std::filesystem::path& dir, const BacktestReport& rep);

/// `strategy,<metric fields>` with one row per run.
void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsBlock>>& rows);

/// `lambda,expected_return,variance,<symbols sorted>`; infeasible points leave weights empty.
void write_frontier_csv(std::ostream& out, const std::vector<std::string>& symbols,
                        const std::vector<FrontierPoint>& points);

/// `rank,symbol,label,slope,vol,rolling_sharpe`.
void write_universe_csv(std::ostream& out, const UniverseSnapshot& snapshot);

/// `rank,fitness,sharpe,turnover,mdd,expression`.
void write_alphas_csv(std::ostream& out, const std::vector<ScoredAlpha>& population);

/// Reads an equity curve from a `date,equity,...` CSV (the equity.csv layout).
std::vector<double> read_equity_csv(const std::filesystem::path& path);

} // namespace sharpefolio
