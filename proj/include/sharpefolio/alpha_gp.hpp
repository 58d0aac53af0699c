#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sharpefolio/market_data.hpp"

namespace sharpefolio {

enum class AlphaOp {
    // leaves
    price,
    volume,
    returns,
    constant,
    // unary
    neg,
    abs,
    rolling_mean,
    rolling_std,
    delay,
    rsi,
    macd,
    rank,
    // binary
    add,
    sub,
    mul,
    div_safe,
};

std::string_view to_string(AlphaOp op);
int arity(AlphaOp op);
/// Number of integer parameters carried by the operator (window, delay, MACD spans).
int param_count(AlphaOp op);

/// Expression tree over per-asset daily series. Value type; children are owned.
struct AlphaExpr {
    AlphaOp op = AlphaOp::price;
    double value = 0.0;            // constant leaves only
    std::array<int, 3> params{};   // used up to param_count(op)
    std::vector<AlphaExpr> children;

    static AlphaExpr leaf(AlphaOp op);
    static AlphaExpr constant(double k);
    static AlphaExpr unary(AlphaOp op, AlphaExpr child, std::array<int, 3> params = {});
    static AlphaExpr binary(AlphaOp op, AlphaExpr lhs, AlphaExpr rhs);

    std::size_t depth() const;
    std::size_t size() const;
    /// Bars of history consumed before the first defined output.
    std::size_t warmup() const;
    /// Parenthesized prefix form, e.g. `(sub (rolling_mean price 5) (rolling_mean price 20))`.
    std::string to_string() const;
    /// Throws MalformedTree on bad syntax, unknown operators, wrong arity or parameters < 1.
    static AlphaExpr parse(std::string_view text);
    /// Throws MalformedTree when arity or parameters are inconsistent.
    void validate() const;

    friend bool operator==(const AlphaExpr&, const AlphaExpr&) = default;
};

/// `[asset][calendar position]`; NaN marks undefined values (warm-up, missing data).
using SignalPanel = std::vector<std::vector<double>>;

SignalPanel eval_alpha(const AlphaExpr& expr, const PricePanel& panel);

struct FitnessWeights {
    double sharpe = 1.0;
    double turnover = 0.1;
    double mdd = 1.0;
};

struct GpConfig {
    std::size_t population = 50;
    std::size_t generations = 10;
    std::size_t max_depth = 6;
    double mutation_rate = 0.2;
    double crossover_rate = 0.8;
    std::uint64_t seed = 42;
    FitnessWeights fitness_weights;
    std::size_t tournament_size = 3;
    /// Fraction of valid assets held (equal weight) each day, best-ranked first.
    double top_quantile = 0.2;
    double cost_bps_per_side = 5.0;
    /// First decision bar of the scoring backtest.
    std::size_t warmup = 30;
    std::size_t hill_climb_patience = 50;
    std::size_t hill_climb_max_steps = 1000;
    /// Expressions placed at the front of the initial population.
    std::vector<AlphaExpr> seeds;

    void validate() const;
};

struct AlphaScore {
    double sharpe = 0.0;
    double turnover = 0.0;
    double mdd = 0.0;
    double fitness = 0.0;
};

double combine_fitness(double sharpe, double turnover, double mdd, const FitnessWeights& w);

/// Backtests the long-only top-quantile portfolio implied by `expr` (no drawdown control).
AlphaScore score_alpha(const AlphaExpr& expr, const PricePanel& panel, const GpConfig& cfg);

struct ScoredAlpha {
    AlphaExpr expr;
    AlphaScore score;
    /// Scoring raised an error; fitness is the worst representable value.
    bool failed = false;
};

struct EvolveResult {
    /// Final population, best first.
    std::vector<ScoredAlpha> population;
    /// Best fitness after initialization and after each generation.
    std::vector<double> best_fitness;
};

EvolveResult evolve(const PricePanel& panel, const GpConfig& cfg);

} // namespace sharpefolio
