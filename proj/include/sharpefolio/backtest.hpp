#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "sharpefolio/market_data.hpp"
#include "sharpefolio/metrics.hpp"
#include "sharpefolio/optimizer.hpp"
#include "sharpefolio/risk.hpp"
#include "sharpefolio/universe.hpp"

namespace sharpefolio {

enum class Strategy { sharpe_blend, equal_weight, cap_weighted, mean_variance };
inline constexpr Strategy kAllStrategies[] = {Strategy::sharpe_blend, Strategy::equal_weight,
                                              Strategy::cap_weighted, Strategy::mean_variance};
std::string_view to_string(Strategy s);
std::optional<Strategy> parse_strategy(std::string_view text);

/// Which candidate set a strategy allocates over.
enum class UniverseMode {
    screened, // full trend and Sharpe screen
    liquid,   // cap/volume leaders only
};
std::string_view to_string(UniverseMode m);
std::optional<UniverseMode> parse_universe_mode(std::string_view text);

enum class Rebalance { daily };

struct BacktestConfig {
    std::optional<Date> start;
    std::optional<Date> end;
    double initial_capital = 1'000'000.0;
    Rebalance rebalance = Rebalance::daily;
    double cost_bps_per_side = 5.0;
    SelectionConfig selection;
    OptimizerConfig optimizer;
    RiskConfig risk = RiskConfig::standard();
    Strategy strategy = Strategy::sharpe_blend;
    UniverseMode universe = UniverseMode::screened;
    /// Return window for the optimizer; defaults to `selection.lookback`.
    std::optional<std::size_t> stats_window;
    /// Caps each position at this multiple of its lookback dollar volume. Off when unset.
    std::optional<double> adv_cap_fraction;
    MetricsOptions metrics;

    std::size_t effective_stats_window() const { return stats_window.value_or(selection.lookback); }
    void validate() const;
};

/// Everything recorded by one run. `dates` and `equity_curve` have n + 1 entries;
/// per-decision series have n, one per trade date `dates[0]` to `dates[n-1]`.
struct BacktestReport {
    std::vector<Date> dates;
    std::vector<double> equity_curve;
    std::vector<double> period_returns;    // V_{t+1} / V_t - 1
    std::vector<double> portfolio_returns; // gross return of the invested sleeve
    std::vector<double> exposures;         // invested fraction of pre-trade equity, after costs
    std::vector<double> target_exposures;  // controller output
    std::vector<double> costs_paid;
    std::vector<WeightVector> weights_history;
    std::vector<RiskTraceRow> risk_trace;
    std::vector<double> benchmark_returns; // equal-weighted average of every asset with a return
    MetricsBlock metrics;

    std::size_t periods() const { return period_returns.size(); }
};

/// Target sleeve weights for the trade executed at the close of calendar index `t`.
/// Must only look at data up to `t - 1`. An empty vector holds cash.
using WeightPolicy = std::function<WeightVector(std::size_t t)>;

/// Allocation over the members of `universe`. `member_caps` is aligned with the members.
WeightVector strategy_weights(Strategy strategy, const UniverseSnapshot& universe, const AssetStats& stats,
                              const std::vector<double>& member_caps, const BacktestConfig& cfg);

BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& cfg);

/// Runs the daily loop for an arbitrary policy. `first_decision` is the earliest
/// calendar index the policy can serve; `cfg.start` may push it later.
BacktestReport run_backtest_with(const PricePanel& panel, const BacktestConfig& cfg, const WeightPolicy& policy,
                                 std::size_t first_decision);

} // namespace sharpefolio
