#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "sharpefolio/market_data.hpp"

namespace sharpefolio {

struct SelectionConfig {
    std::size_t top_n = 10;
    /// Window length in bars for slope, volatility and rolling Sharpe.
    std::size_t lookback = 60;
    /// Slope threshold on first-value-normalized prices, per bar.
    double tau1 = 0.001;
    /// Threshold on the standard deviation of daily log returns.
    double tau2 = 0.02;
    double risk_free = 0.0;
    /// Liquidity keep-rule: lookback average volume must reach this.
    double min_adv = 0.0;
    /// Capitalization keep-rule on the latest market cap; assets without a cap pass only when 0.
    double min_cap = 0.0;

    void validate() const;
};

enum class Trend { up, down, volatile_, sideways };
std::string_view to_string(Trend trend);

struct AssetLabel {
    std::string symbol;
    Trend label = Trend::sideways;
    double slope = 0.0;
    double vol = 0.0;
    /// Sharpe over the latest window; nullopt when the window has zero spread.
    std::optional<double> rolling_sharpe;
};

struct UniverseMember {
    std::size_t rank = 0; // 1-based
    AssetLabel label;
};

struct UniverseSnapshot {
    Date date;
    std::vector<UniverseMember> members;

    std::vector<std::string> symbols() const;
};

/// Intersection of the top-`top_n` lists by market cap and by volume at `date`.
///
/// Volume is the day's volume, or the trailing `volume_lookback` average when the
/// day's volume is zero. Assets without a cap rank below every capped asset.
/// Ordered by combined rank, ties broken by symbol.
std::vector<std::string> rank_by_cap_and_volume(const PricePanel& panel, const Date& date,
                                                std::size_t top_n, std::size_t volume_lookback = 20);
std::vector<std::size_t> rank_by_cap_and_volume_at(const PricePanel& panel, std::size_t t,
                                                   std::size_t top_n, std::size_t volume_lookback);

/// OLS slope of `prices / prices[0]` against 0..n-1.
double calc_slope(std::span<const double> prices);

/// Labels the trailing `cfg.lookback` prices: up, down, volatile, else sideways, in that order.
AssetLabel label_asset(std::span<const double> prices, const SelectionConfig& cfg,
                       std::string symbol = {});

/// Sharpe of every length-`window` slice of `returns`, in order.
std::vector<std::optional<double>> rolling_sharpe(std::span<const double> returns, std::size_t window,
                                                  double risk_free);

/// Full screen at `date`: cap/volume ranking, trend labels, keep up/volatile
/// names that pass the liquidity and cap rules, then order by rolling Sharpe.
/// Throws EmptyUniverse when nothing survives.
UniverseSnapshot select_universe(const PricePanel& panel, const Date& date, const SelectionConfig& cfg);
UniverseSnapshot select_universe_at(const PricePanel& panel, std::size_t t, const SelectionConfig& cfg);

/// The cap/volume set alone, labeled but not trend-filtered. Used for passive benchmarks.
UniverseSnapshot liquid_universe_at(const PricePanel& panel, std::size_t t, const SelectionConfig& cfg);

} // namespace sharpefolio
