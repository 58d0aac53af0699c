#include "sharpefolio/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sharpefolio/detail/moments.hpp"
#include "sharpefolio/error.hpp"

namespace sharpefolio {

namespace {

std::vector<double> excess_of(std::span<const double> returns, double risk_free) {
    std::vector<double> out(returns.begin(), returns.end());
    for (double& x : out) x -= risk_free;
    return out;
}

// Central moments m2 and the requested higher moment about the sample mean.
std::pair<double, double> central_moments(std::span<const double> xs, int order) {
    double mu = detail::mean(xs);
    double m2 = 0.0, mk = 0.0;
    for (double x : xs) {
        double d = x - mu;
        m2 += d * d;
        mk += std::pow(d, order);
    }
    const auto n = static_cast<double>(xs.size());
    return {m2 / n, mk / n};
}

template <class F>
std::optional<double> try_metric(F&& f) {
    try {
        return f();
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace

double roi(double v_start, double v_end) {
    if (!(v_start > 0.0)) throw Error(ErrorCode::NonPositiveStart, "starting value must be positive");
    return (v_end - v_start) / v_start;
}

double sharpe(std::span<const double> returns, double risk_free, int periods_per_year) {
    if (returns.size() < 2) throw Error(ErrorCode::InsufficientSample, "Sharpe needs at least 2 observations");
    auto ex = excess_of(returns, risk_free);
    if (detail::all_equal(ex)) throw Error(ErrorCode::ZeroVariance, "returns have zero variance");
    double mu = detail::mean(ex);
    return mu / detail::sample_std(ex, mu) * std::sqrt(static_cast<double>(periods_per_year));
}

double max_drawdown(std::span<const double> equity) {
    if (equity.empty()) throw Error(ErrorCode::EmptySeries, "equity curve is empty");
    double peak = equity.front();
    double worst = 0.0;
    for (double v : equity) {
        if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveValues, "equity values must be positive");
        peak = std::max(peak, v);
        worst = std::max(worst, (peak - v) / peak);
    }
    return worst;
}

std::vector<double> turnover_series(std::span<const WeightVector> weights_history) {
    if (weights_history.size() < 2)
        throw Error(ErrorCode::InsufficientSnapshots, "turnover needs at least 2 weight snapshots");
    std::vector<double> out;
    out.reserve(weights_history.size() - 1);
    for (std::size_t i = 1; i < weights_history.size(); ++i)
        out.push_back(turnover(weights_history[i], weights_history[i - 1]));
    return out;
}

double skewness(std::span<const double> returns) {
    if (returns.size() < 3) throw Error(ErrorCode::InsufficientSample, "skewness needs at least 3 observations");
    if (detail::all_equal(returns)) throw Error(ErrorCode::ZeroVariance, "returns have zero variance");
    auto [m2, m3] = central_moments(returns, 3);
    return m3 / std::pow(m2, 1.5);
}

double excess_kurtosis(std::span<const double> returns) {
    if (returns.size() < 3) throw Error(ErrorCode::InsufficientSample, "kurtosis needs at least 3 observations");
    if (detail::all_equal(returns)) throw Error(ErrorCode::ZeroVariance, "returns have zero variance");
    auto [m2, m4] = central_moments(returns, 4);
    return m4 / (m2 * m2) - 3.0;
}

TailRisk var_cvar(std::span<const double> returns, double alpha) {
    if (!(alpha > 0.0 && alpha < 0.5)) throw Error(ErrorCode::InsufficientSample, "alpha must lie in (0, 0.5)");
    const auto n = returns.size();
    const auto needed = static_cast<std::size_t>(std::ceil(1.0 / alpha - 1e-9));
    if (n < needed)
        throw Error(ErrorCode::InsufficientSample,
                    "need at least " + std::to_string(needed) + " observations at alpha " + std::to_string(alpha));
    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    auto k = static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9));
    k = std::clamp<std::size_t>(k, 1, n);
    TailRisk out;
    out.var = sorted[k - 1];
    double sum = 0.0;
    std::size_t count = 0;
    for (double r : sorted) {
        if (r > out.var) break;
        sum += r;
        ++count;
    }
    out.cvar = sum / static_cast<double>(count);
    return out;
}

double sortino(std::span<const double> returns, double risk_free, int periods_per_year) {
    if (returns.empty()) throw Error(ErrorCode::EmptySeries, "no returns");
    auto ex = excess_of(returns, risk_free);
    double downside = 0.0;
    bool any = false;
    for (double x : ex) {
        if (x < 0.0) {
            downside += x * x;
            any = true;
        }
    }
    if (!any) throw Error(ErrorCode::NoDownside, "no return falls below the risk-free rate");
    double sigma_d = std::sqrt(downside / static_cast<double>(ex.size()));
    return detail::mean(ex) / sigma_d * std::sqrt(static_cast<double>(periods_per_year));
}

AlphaBeta alpha_beta(std::span<const double> portfolio, std::span<const double> benchmark, double risk_free,
                     int periods_per_year) {
    if (portfolio.size() != benchmark.size() || portfolio.size() < 3)
        throw Error(ErrorCode::InsufficientSample, "alpha/beta need equal-length series of at least 3 points");
    auto y = excess_of(portfolio, risk_free);
    auto x = excess_of(benchmark, risk_free);
    if (detail::all_equal(x)) throw Error(ErrorCode::DegenerateBenchmark, "benchmark excess returns are constant");
    double mx = detail::mean(x), my = detail::mean(y);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (!(sxx > 0.0)) throw Error(ErrorCode::DegenerateBenchmark, "benchmark excess variance is zero");
    AlphaBeta out;
    out.beta = sxy / sxx;
    out.alpha = (my - out.beta * mx) * static_cast<double>(periods_per_year);
    return out;
}

double win_rate(std::span<const double> period_returns) {
    if (period_returns.empty()) throw Error(ErrorCode::EmptySeries, "no returns");
    auto wins = std::count_if(period_returns.begin(), period_returns.end(), [](double r) { return r > 0.0; });
    return 100.0 * static_cast<double>(wins) / static_cast<double>(period_returns.size());
}

double annualized_return(std::span<const double> equity, int periods_per_year) {
    if (equity.size() < 2) throw Error(ErrorCode::InsufficientSample, "annualized return needs at least 2 points");
    if (!(equity.front() > 0.0) || !(equity.back() > 0.0))
        throw Error(ErrorCode::NonPositiveValues, "equity values must be positive");
    double periods = static_cast<double>(equity.size() - 1);
    return std::pow(equity.back() / equity.front(), static_cast<double>(periods_per_year) / periods) - 1.0;
}

std::vector<double> equity_returns(std::span<const double> equity) {
    std::vector<double> out;
    if (equity.size() < 2) return out;
    out.reserve(equity.size() - 1);
    for (std::size_t i = 1; i < equity.size(); ++i) out.push_back(equity[i] / equity[i - 1] - 1.0);
    return out;
}

std::vector<std::pair<std::string_view, std::optional<double>>> fields(const MetricsBlock& m) {
    return {{"roi", m.roi},
            {"annualized_return", m.annualized_return},
            {"sharpe", m.sharpe},
            {"sortino", m.sortino},
            {"mdd", m.mdd},
            {"turnover", m.turnover},
            {"skew", m.skew},
            {"excess_kurtosis", m.excess_kurtosis},
            {"var_alpha", m.var_alpha},
            {"cvar_alpha", m.cvar_alpha},
            {"alpha", m.alpha},
            {"beta", m.beta},
            {"win_rate", m.win_rate}};
}

MetricsBlock compute_metrics(std::span<const double> equity, std::span<const WeightVector> weights_history,
                             std::optional<std::span<const double>> benchmark_returns, const MetricsOptions& o) {
    if (equity.empty()) throw Error(ErrorCode::EmptySeries, "equity curve is empty");
    const auto r = equity_returns(equity);
    MetricsBlock m;
    m.roi = try_metric([&] { return roi(equity.front(), equity.back()); });
    m.annualized_return = try_metric([&] { return annualized_return(equity, o.periods_per_year); });
    m.sharpe = try_metric([&] { return sharpe(r, o.risk_free, o.periods_per_year); });
    m.sortino = try_metric([&] { return sortino(r, o.risk_free, o.periods_per_year); });
    m.mdd = try_metric([&] { return max_drawdown(equity); });
    m.turnover = try_metric([&] {
        auto ts = turnover_series(weights_history);
        return detail::mean(ts);
    });
    m.skew = try_metric([&] { return skewness(r); });
    m.excess_kurtosis = try_metric([&] { return excess_kurtosis(r); });
    if (auto tail = try_metric([&] { return var_cvar(r, o.tail_alpha).var; })) {
        m.var_alpha = tail;
        m.cvar_alpha = var_cvar(r, o.tail_alpha).cvar;
    }
    if (benchmark_returns) {
        if (auto ab = [&]() -> std::optional<AlphaBeta> {
                try {
                    return alpha_beta(r, *benchmark_returns, o.risk_free, o.periods_per_year);
                } catch (const Error&) {
                    return std::nullopt;
                }
            }()) {
            m.alpha = ab->alpha;
            m.beta = ab->beta;
        }
    }
    m.win_rate = try_metric([&] { return win_rate(r); });
    return m;
}

nlohmann::ordered_json to_json(const MetricsBlock& m) {
    nlohmann::ordered_json j;
    for (const auto& [name, value] : fields(m)) {
        if (value && std::isfinite(*value)) j[std::string(name)] = *value;
        else j[std::string(name)] = nullptr;
    }
    return j;
}

} // namespace sharpefolio
