#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "sharpefolio/optimizer.hpp"

namespace sharpefolio {

inline constexpr int kTradingDaysPerYear = 252;

double roi(double v_start, double v_end);
/// Mean excess return over its sample standard deviation, times sqrt(periods_per_year).
double sharpe(std::span<const double> returns, double risk_free = 0.0, int periods_per_year = kTradingDaysPerYear);
/// Largest (running peak - value) / running peak, in one pass.
double max_drawdown(std::span<const double> equity);
std::vector<double> turnover_series(std::span<const WeightVector> weights_history);
/// Population skewness about the sample mean.
double skewness(std::span<const double> returns);
/// Population kurtosis minus 3.
double excess_kurtosis(std::span<const double> returns);

struct TailRisk {
    double var = 0.0;
    double cvar = 0.0;
};
/// Lower order statistic at ceil(alpha * n), no interpolation; cvar averages returns at or below it.
TailRisk var_cvar(std::span<const double> returns, double alpha);

/// Mean excess over the full-sample downside deviation, times sqrt(periods_per_year).
double sortino(std::span<const double> returns, double risk_free = 0.0, int periods_per_year = kTradingDaysPerYear);

struct AlphaBeta {
    double alpha = 0.0; // annualized intercept
    double beta = 0.0;
};
AlphaBeta alpha_beta(std::span<const double> portfolio, std::span<const double> benchmark, double risk_free = 0.0,
                     int periods_per_year = kTradingDaysPerYear);

/// Percentage of strictly positive periods.
double win_rate(std::span<const double> period_returns);
double annualized_return(std::span<const double> equity, int periods_per_year = kTradingDaysPerYear);

/// Simple returns between consecutive equity values.
std::vector<double> equity_returns(std::span<const double> equity);

/// Every evaluation metric for one strategy. Undefined ratios are left empty.
struct MetricsBlock {
    std::optional<double> roi;
    std::optional<double> annualized_return;
    std::optional<double> sharpe;
    std::optional<double> sortino;
    std::optional<double> mdd;
    std::optional<double> turnover;
    std::optional<double> skew;
    std::optional<double> excess_kurtosis;
    std::optional<double> var_alpha;
    std::optional<double> cvar_alpha;
    std::optional<double> alpha;
    std::optional<double> beta;
    std::optional<double> win_rate;
};

/// Field names, in serialization order.
inline constexpr std::array<std::string_view, 13> kMetricsFields = {
    "roi",  "annualized_return", "sharpe",    "sortino",    "mdd",   "turnover", "skew",
    "excess_kurtosis", "var_alpha", "cvar_alpha", "alpha", "beta",     "win_rate"};

std::vector<std::pair<std::string_view, std::optional<double>>> fields(const MetricsBlock& m);

struct MetricsOptions {
    double risk_free = 0.0;
    int periods_per_year = kTradingDaysPerYear;
    double tail_alpha = 0.05;
};

MetricsBlock compute_metrics(std::span<const double> equity, std::span<const WeightVector> weights_history,
                             std::optional<std::span<const double>> benchmark_returns,
                             const MetricsOptions& options = {});

nlohmann::ordered_json to_json(const MetricsBlock& m);

} // namespace sharpefolio
