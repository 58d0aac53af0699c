#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "sharpefolio/date.hpp"
#include "sharpefolio/market_data.hpp"

namespace sharpefolio {

/// Per-period moments of a set of assets over one estimation window.
struct AssetStats {
    std::vector<std::string> symbols;
    Eigen::VectorXd mu;
    Eigen::VectorXd sigma;
    Eigen::VectorXd sharpe; // (mu - risk_free) / sigma, 0 where sigma == 0
    Eigen::MatrixXd cov;
    /// Assets whose window has zero variance. They are excluded from the blend.
    std::vector<bool> zero_variance;
    double risk_free = 0.0;

    std::size_t size() const { return symbols.size(); }
    /// Builds stats from explicit moments; sigma and sharpe are derived from `cov`.
    static AssetStats from_moments(std::vector<std::string> symbols, Eigen::VectorXd mu, Eigen::MatrixXd cov,
                                   double risk_free = 0.0);
};

struct WeightVector {
    Date date;
    std::vector<std::string> symbols;
    std::vector<double> weights;

    double sum() const;
    double weight_of(std::string_view symbol) const;
    bool empty() const { return symbols.empty(); }
};

struct Bounds {
    double lower = 0.0;
    double upper = 1.0;
};

struct OptimizerConfig {
    double lambda = 10.0;
    std::optional<double> r_min;
    Bounds default_bounds;
    std::map<std::string, Bounds> asset_bounds;
    /// Maximum sum of absolute weight changes per rebalance; nullopt disables the cap.
    std::optional<double> turnover_cap;
    double blend_alpha = 0.5;
    double risk_free = 0.0;
    int max_iterations = 10000;
    double tolerance = 1e-10;

    Bounds bounds_for(const std::string& symbol) const;
    void validate() const;
};

enum class Objective { max_return, min_risk, max_sharpe, utility };
std::string_view to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view text);

/// Sample mean and covariance of the trailing `window` returns of every asset.
AssetStats estimate_stats(const ReturnPanel& returns, std::size_t window, double risk_free);
/// Same, for `symbols` over the window ending at return index `end` (inclusive).
AssetStats estimate_stats(const ReturnPanel& returns, const std::vector<std::string>& symbols,
                          std::size_t end, std::size_t window, double risk_free);

struct BlendResult {
    WeightVector weights;
    /// Set when no asset had a positive Sharpe and the Sharpe leg fell back to equal weights.
    bool sharpe_leg_equal_weight = false;
    std::vector<std::string> excluded;
};

/// `alpha * inverse-vol + (1 - alpha) * positive-Sharpe` weights, each leg normalized first.
BlendResult blend_weights(const AssetStats& stats, double alpha = 0.5);

WeightVector solve_mean_variance(const AssetStats& stats, const OptimizerConfig& cfg, Objective objective);

/// Nearest allocation (Euclidean) that sums to one within the configured bounds.
/// Throws Infeasible when the bounds admit no such allocation.
WeightVector enforce_bounds(const WeightVector& w, const OptimizerConfig& cfg);

WeightVector apply_turnover_cap(const WeightVector& prev, const WeightVector& target, double t_max);

struct FrontierPoint {
    double lambda = 0.0;
    double expected_return = 0.0;
    double variance = 0.0;
    std::optional<WeightVector> weights;
    std::optional<std::string> error;
};

std::vector<FrontierPoint> efficient_frontier(const AssetStats& stats, const std::vector<double>& lambdas,
                                              const OptimizerConfig& cfg = {});

/// `count` log-spaced values from `lo` to `hi` inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t count);

double turnover(const WeightVector& a, const WeightVector& b);
double portfolio_return(const AssetStats& stats, const WeightVector& w);
double portfolio_variance(const AssetStats& stats, const WeightVector& w);

} // namespace sharpefolio
