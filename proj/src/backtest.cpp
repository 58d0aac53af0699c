#include "sharpefolio/backtest.hpp"

#include <algorithm>
#include <cmath>

#include "sharpefolio/error.hpp"

namespace sharpefolio {

std::string_view to_string(Strategy s) {
    switch (s) {
    case Strategy::sharpe_blend: return "sharpe_blend";
    case Strategy::equal_weight: return "equal_weight";
    case Strategy::cap_weighted: return "cap_weighted";
    case Strategy::mean_variance: return "mean_variance";
    }
    return "sharpe_blend";
}

std::optional<Strategy> parse_strategy(std::string_view text) {
    for (auto s : kAllStrategies)
        if (to_string(s) == text) return s;
    return std::nullopt;
}

std::string_view to_string(UniverseMode m) { return m == UniverseMode::screened ? "screened" : "liquid"; }

std::optional<UniverseMode> parse_universe_mode(std::string_view text) {
    if (text == "screened") return UniverseMode::screened;
    if (text == "liquid") return UniverseMode::liquid;
    return std::nullopt;
}

void BacktestConfig::validate() const {
    if (start && end && !(*start < *end)) throw Error(ErrorCode::ConfigInvalid, "backtest.start must precede backtest.end");
    if (!(initial_capital > 0.0)) throw Error(ErrorCode::ConfigInvalid, "backtest.initial_capital must be > 0");
    if (!(cost_bps_per_side >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "backtest.cost_bps_per_side must be >= 0");
    if (adv_cap_fraction && !(*adv_cap_fraction > 0.0))
        throw Error(ErrorCode::ConfigInvalid, "backtest.adv_cap_fraction must be > 0");
    if (stats_window && *stats_window < 2) throw Error(ErrorCode::ConfigInvalid, "backtest.stats_window must be >= 2");
    selection.validate();
    optimizer.validate();
    risk.validate();
}

WeightVector strategy_weights(Strategy strategy, const UniverseSnapshot& universe, const AssetStats& stats,
                              const std::vector<double>& member_caps, const BacktestConfig& cfg) {
    if (universe.members.empty()) throw Error(ErrorCode::EmptyUniverse, "strategy needs a non-empty universe");
    WeightVector w;
    w.date = universe.date;
    w.symbols = universe.symbols();
    const std::size_t n = w.symbols.size();
    if (n == 1) {
        w.weights = {1.0};
        return enforce_bounds(w, cfg.optimizer);
    }
    switch (strategy) {
    case Strategy::equal_weight:
        w.weights.assign(n, 1.0 / static_cast<double>(n));
        return enforce_bounds(w, cfg.optimizer);
    case Strategy::cap_weighted: {
        double total = 0.0;
        w.weights.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            double c = i < member_caps.size() ? member_caps[i] : kMissing;
            if (!is_missing(c) && c > 0.0) {
                w.weights[i] = c;
                total += c;
            }
        }
        if (!(total > 0.0)) w.weights.assign(n, 1.0 / static_cast<double>(n));
        else
            for (auto& x : w.weights) x /= total;
        return enforce_bounds(w, cfg.optimizer);
    }
    case Strategy::sharpe_blend: {
        auto blend = blend_weights(stats, cfg.optimizer.blend_alpha).weights;
        blend.date = universe.date;
        return enforce_bounds(blend, cfg.optimizer);
    }
    case Strategy::mean_variance: {
        auto mv = solve_mean_variance(stats, cfg.optimizer, Objective::utility);
        mv.date = universe.date;
        return mv;
    }
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown strategy");
}

namespace {

double trailing_dollar_volume(const PricePanel& panel, std::size_t a, std::size_t t, std::size_t lookback) {
    std::size_t first = t + 1 >= lookback ? t + 1 - lookback : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= t; ++k) {
        double v = panel.volumes[a][k], p = panel.closes[a][k];
        if (!is_missing(v) && !is_missing(p)) sum += v * p;
    }
    return sum / static_cast<double>(t + 1 - first);
}

} // namespace

BacktestReport run_backtest_with(const PricePanel& panel, const BacktestConfig& cfg, const WeightPolicy& policy,
                                 std::size_t first_decision) {
    cfg.validate();
    const std::size_t len = panel.length();
    std::size_t s = std::max<std::size_t>(first_decision, 1);
    if (cfg.start) {
        auto idx = std::lower_bound(panel.calendar.begin(), panel.calendar.end(), *cfg.start) - panel.calendar.begin();
        if (static_cast<std::size_t>(idx) < s)
            throw Error(ErrorCode::InsufficientHistory,
                        "backtest.start " + cfg.start->to_string() + " leaves too little history before it");
        s = static_cast<std::size_t>(idx);
    }
    std::size_t e = len == 0 ? 0 : len - 1;
    if (cfg.end) {
        auto idx = panel.index_at_or_before(*cfg.end);
        if (!idx) throw Error(ErrorCode::InsufficientHistory, "backtest.end precedes the panel");
        e = *idx;
    }
    if (len == 0 || s >= e)
        throw Error(ErrorCode::InsufficientHistory, "panel too short for the requested backtest window");

    const double cost_rate = cfg.cost_bps_per_side * 1e-4;
    const std::size_t n_assets = panel.asset_count();
    std::vector<double> holdings(n_assets, 0.0);
    std::vector<double> target(n_assets, 0.0);
    RiskState state;
    WeightVector prev_target;
    double equity = cfg.initial_capital;
    std::size_t infeasible_days = 0;
    std::string last_infeasible;

    BacktestReport rep;
    const std::size_t periods = e - s;
    rep.dates.reserve(periods + 1);
    rep.equity_curve.reserve(periods + 1);
    rep.dates.push_back(panel.calendar[s]);
    rep.equity_curve.push_back(equity);

    for (std::size_t t = s; t < e; ++t) {
        double exposure = 1.0;
        if (cfg.risk.enabled) {
            state = update(state, equity, cfg.risk);
            exposure = state.exposure;
        }

        WeightVector w;
        try {
            w = policy(t);
        } catch (const Error& err) {
            // Nothing to hold, or the constraints admit no allocation today: stay in cash.
            if (err.code() == ErrorCode::Infeasible) {
                ++infeasible_days;
                last_infeasible = err.what();
            } else if (err.code() != ErrorCode::EmptyUniverse)
                throw;
        }
        w.date = panel.calendar[t];
        if (cfg.optimizer.turnover_cap && !prev_target.empty() && !w.empty())
            w = apply_turnover_cap(prev_target, w, *cfg.optimizer.turnover_cap);

        std::fill(target.begin(), target.end(), 0.0);
        for (std::size_t i = 0; i < w.symbols.size(); ++i) {
            auto a = panel.asset_index(w.symbols[i]);
            if (!a || is_missing(panel.closes[*a][t]) || is_missing(panel.closes[*a][t + 1]))
                throw Error(ErrorCode::InsufficientHistory, "no tradable price for " + w.symbols[i] + " on " +
                                                                panel.calendar[t].to_string());
            double value = exposure * w.weights[i] * equity;
            if (cfg.adv_cap_fraction)
                value = std::min(value, *cfg.adv_cap_fraction *
                                            trailing_dollar_volume(panel, *a, t - 1, cfg.selection.lookback));
            target[*a] += value;
        }

        double traded = 0.0;
        for (std::size_t a = 0; a < n_assets; ++a) traded += std::abs(target[a] - holdings[a]);
        const double cost = cost_rate * traded;
        const double scale = (equity - cost) / equity;

        double invested = 0.0, gain = 0.0, pnl = 0.0;
        for (std::size_t a = 0; a < n_assets; ++a) {
            if (target[a] == 0.0) {
                holdings[a] = 0.0;
                continue;
            }
            double r = panel.closes[a][t + 1] / panel.closes[a][t] - 1.0;
            invested += target[a];
            gain += target[a] * r;
            double held = target[a] * scale;
            pnl += held * r;
            holdings[a] = held * (1.0 + r);
        }
        const double next_equity = equity - cost + pnl;
        if (!(next_equity > 0.0)) throw Error(ErrorCode::NonPositiveEquity, "portfolio equity reached zero");

        double bench = 0.0;
        std::size_t bench_n = 0;
        for (std::size_t a = 0; a < n_assets; ++a) {
            double r = panel.closes[a][t + 1] / panel.closes[a][t] - 1.0;
            if (!std::isnan(r)) {
                bench += r;
                ++bench_n;
            }
        }

        rep.portfolio_returns.push_back(invested > 0.0 ? gain / invested : 0.0);
        rep.exposures.push_back(invested * scale / equity);
        rep.target_exposures.push_back(exposure);
        rep.costs_paid.push_back(cost);
        rep.period_returns.push_back(next_equity / equity - 1.0);
        rep.benchmark_returns.push_back(bench_n ? bench / static_cast<double>(bench_n) : 0.0);
        rep.risk_trace.push_back({panel.calendar[t], equity, cfg.risk.enabled ? state : RiskState{equity, 0.0, 1.0, 0}});
        prev_target = w;
        rep.weights_history.push_back(std::move(w));

        equity = next_equity;
        rep.dates.push_back(panel.calendar[t + 1]);
        rep.equity_curve.push_back(equity);
    }

    if (infeasible_days == e - s)
        throw Error(ErrorCode::Infeasible, "no feasible allocation on any day: " + last_infeasible);

    rep.metrics = compute_metrics(rep.equity_curve, rep.weights_history,
                                  std::span<const double>(rep.benchmark_returns), cfg.metrics);
    return rep;
}

BacktestReport run_backtest(const PricePanel& panel, const BacktestConfig& cfg) {
    cfg.validate();
    const std::size_t window = cfg.effective_stats_window();
    const ReturnPanel returns = to_returns(panel);
    // Selection runs on t - 1 and needs `lookback` bars before it; stats end at return index t - 2.
    const std::size_t first = std::max(cfg.selection.lookback + 1, window + 1);

    WeightPolicy policy = [&](std::size_t t) {
        const std::size_t signal = t - 1;
        UniverseSnapshot universe = cfg.universe == UniverseMode::screened
                                        ? select_universe_at(panel, signal, cfg.selection)
                                        : liquid_universe_at(panel, signal, cfg.selection);
        auto symbols = universe.symbols();
        std::vector<double> caps;
        for (const auto& sym : symbols) caps.push_back(panel.caps[*panel.asset_index(sym)][signal]);
        AssetStats stats;
        if (cfg.strategy == Strategy::sharpe_blend || cfg.strategy == Strategy::mean_variance)
            stats = estimate_stats(returns, symbols, signal - 1, window, cfg.selection.risk_free);
        return strategy_weights(cfg.strategy, universe, stats, caps, cfg);
    };
    return run_backtest_with(panel, cfg, policy, first);
}

} // namespace sharpefolio
