#include "sharpefolio/universe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharpefolio/detail/moments.hpp"
#include "sharpefolio/error.hpp"

namespace sharpefolio {

void SelectionConfig::validate() const {
    if (top_n < 1) throw Error(ErrorCode::ConfigInvalid, "selection.top_n must be >= 1");
    if (lookback < 2) throw Error(ErrorCode::ConfigInvalid, "selection.lookback must be >= 2");
    if (!(tau1 > 0.0)) throw Error(ErrorCode::ConfigInvalid, "selection.tau1 must be > 0");
    if (!(tau2 > 0.0)) throw Error(ErrorCode::ConfigInvalid, "selection.tau2 must be > 0");
    if (!(min_adv >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "selection.min_adv must be >= 0");
    if (!(min_cap >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "selection.min_cap must be >= 0");
    if (!std::isfinite(risk_free)) throw Error(ErrorCode::ConfigInvalid, "selection.risk_free must be finite");
}

std::string_view to_string(Trend trend) {
    switch (trend) {
    case Trend::up: return "up";
    case Trend::down: return "down";
    case Trend::volatile_: return "volatile";
    case Trend::sideways: return "sideways";
    }
    return "sideways";
}

std::vector<std::string> UniverseSnapshot::symbols() const {
    std::vector<std::string> out;
    out.reserve(members.size());
    for (const auto& m : members) out.push_back(m.label.symbol);
    return out;
}

namespace {

double trailing_volume(const PricePanel& panel, std::size_t a, std::size_t t, std::size_t lookback) {
    std::size_t first = t + 1 >= lookback ? t + 1 - lookback : 0;
    double sum = 0.0;
    for (std::size_t k = first; k <= t; ++k) {
        double v = panel.volumes[a][k];
        if (!is_missing(v)) sum += v;
    }
    return sum / static_cast<double>(t + 1 - first);
}

// Positions of the top_n assets by `metric` (descending, symbol tie-break).
std::vector<std::size_t> top_by(const PricePanel& panel, std::vector<std::size_t> candidates,
                                const std::vector<double>& metric, std::size_t top_n) {
    std::stable_sort(candidates.begin(), candidates.end(), [&](std::size_t x, std::size_t y) {
        if (metric[x] != metric[y]) return metric[x] > metric[y];
        return panel.assets[x] < panel.assets[y];
    });
    if (candidates.size() > top_n) candidates.resize(top_n);
    return candidates;
}

bool window_complete(std::span<const double> xs) {
    return std::none_of(xs.begin(), xs.end(), [](double v) { return is_missing(v); });
}

std::optional<double> window_sharpe(std::span<const double> returns, double risk_free) {
    std::vector<double> excess(returns.begin(), returns.end());
    for (double& x : excess) x -= risk_free;
    if (detail::all_equal(excess)) return std::nullopt;
    double mu = detail::mean(excess);
    double sd = detail::sample_std(excess, mu);
    if (!(sd > 0.0)) return std::nullopt;
    return mu / sd;
}

} // namespace

std::vector<std::size_t> rank_by_cap_and_volume_at(const PricePanel& panel, std::size_t t,
                                                   std::size_t top_n, std::size_t volume_lookback) {
    if (t >= panel.length()) throw Error(ErrorCode::NoDataAtDate, "date index out of range");
    const double lowest = -std::numeric_limits<double>::infinity();
    std::vector<std::size_t> eligible;
    std::vector<double> cap(panel.asset_count(), lowest), vol(panel.asset_count(), lowest);
    bool any_cap = false;
    for (std::size_t a = 0; a < panel.asset_count(); ++a) {
        if (is_missing(panel.closes[a][t])) continue;
        eligible.push_back(a);
        double c = panel.caps[a][t];
        if (!is_missing(c)) {
            cap[a] = c;
            any_cap = true;
        }
        double v = panel.volumes[a][t];
        if (is_missing(v) || v <= 0.0) v = trailing_volume(panel, a, t, std::max<std::size_t>(volume_lookback, 1));
        vol[a] = v;
    }
    if (eligible.empty())
        throw Error(ErrorCode::NoDataAtDate, "no asset has a close on " + panel.calendar[t].to_string());

    auto by_vol = top_by(panel, eligible, vol, top_n);
    if (!any_cap) return by_vol;
    auto by_cap = top_by(panel, eligible, cap, top_n);

    std::vector<std::pair<std::size_t, std::size_t>> both; // (rank sum, asset)
    for (std::size_t i = 0; i < by_cap.size(); ++i) {
        auto it = std::find(by_vol.begin(), by_vol.end(), by_cap[i]);
        if (it != by_vol.end())
            both.emplace_back(i + static_cast<std::size_t>(it - by_vol.begin()), by_cap[i]);
    }
    std::sort(both.begin(), both.end(), [&](const auto& x, const auto& y) {
        if (x.first != y.first) return x.first < y.first;
        return panel.assets[x.second] < panel.assets[y.second];
    });
    std::vector<std::size_t> out;
    for (const auto& [score, a] : both) out.push_back(a);
    return out;
}

std::vector<std::string> rank_by_cap_and_volume(const PricePanel& panel, const Date& date,
                                                std::size_t top_n, std::size_t volume_lookback) {
    auto t = panel.date_index(date);
    if (!t) throw Error(ErrorCode::NoDataAtDate, date.to_string() + " is not in the panel calendar");
    std::vector<std::string> out;
    for (auto a : rank_by_cap_and_volume_at(panel, *t, top_n, volume_lookback)) out.push_back(panel.assets[a]);
    return out;
}

double calc_slope(std::span<const double> prices) {
    const std::size_t n = prices.size();
    if (n < 2) throw Error(ErrorCode::InsufficientHistory, "slope needs at least 2 prices");
    const double base = prices.front();
    const double x_mean = static_cast<double>(n - 1) / 2.0;
    double y_mean = 0.0;
    for (double p : prices) y_mean += p / base;
    y_mean /= static_cast<double>(n);
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double dx = static_cast<double>(i) - x_mean;
        sxy += dx * (prices[i] / base - y_mean);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

AssetLabel label_asset(std::span<const double> prices, const SelectionConfig& cfg, std::string symbol) {
    if (prices.size() < cfg.lookback || prices.size() < 2)
        throw Error(ErrorCode::InsufficientHistory,
                    "labeling needs " + std::to_string(cfg.lookback) + " prices, got " + std::to_string(prices.size()));
    auto window = prices.subspan(prices.size() - cfg.lookback);

    AssetLabel out;
    out.symbol = std::move(symbol);
    out.slope = calc_slope(window);
    std::vector<double> log_returns;
    log_returns.reserve(window.size() - 1);
    for (std::size_t i = 1; i < window.size(); ++i) log_returns.push_back(std::log(window[i] / window[i - 1]));
    out.vol = detail::all_equal(log_returns) ? 0.0 : detail::population_std(log_returns, detail::mean(log_returns));

    if (out.slope > cfg.tau1) out.label = Trend::up;
    else if (out.slope < -cfg.tau1) out.label = Trend::down;
    else if (out.vol > cfg.tau2) out.label = Trend::volatile_;
    else out.label = Trend::sideways;
    return out;
}

std::vector<std::optional<double>> rolling_sharpe(std::span<const double> returns, std::size_t window,
                                                  double risk_free) {
    if (window < 2) throw Error(ErrorCode::InsufficientHistory, "rolling Sharpe window must be >= 2");
    if (returns.size() < window)
        throw Error(ErrorCode::InsufficientHistory, "series shorter than the rolling window");
    std::vector<std::optional<double>> out;
    out.reserve(returns.size() - window + 1);
    for (std::size_t end = window; end <= returns.size(); ++end)
        out.push_back(window_sharpe(returns.subspan(end - window, window), risk_free));
    return out;
}

namespace {

struct Candidate {
    AssetLabel label;
    double adv = 0.0;
    double cap = 0.0;
};

std::vector<Candidate> label_candidates(const PricePanel& panel, std::size_t t, const SelectionConfig& cfg) {
    cfg.validate();
    if (t >= panel.length()) throw Error(ErrorCode::NoDataAtDate, "date index out of range");
    if (t < cfg.lookback)
        throw Error(ErrorCode::InsufficientHistory,
                    panel.calendar[t].to_string() + " has fewer than " + std::to_string(cfg.lookback) + " prior bars");

    std::vector<Candidate> out;
    for (auto a : rank_by_cap_and_volume_at(panel, t, cfg.top_n, cfg.lookback)) {
        std::span<const double> closes(panel.closes[a]);
        auto window = closes.subspan(t - cfg.lookback, cfg.lookback + 1);
        if (!window_complete(window)) continue;
        Candidate c;
        c.label = label_asset(window, cfg, panel.assets[a]);
        std::vector<double> r(cfg.lookback);
        for (std::size_t i = 0; i < cfg.lookback; ++i) r[i] = window[i + 1] / window[i] - 1.0;
        c.label.rolling_sharpe = window_sharpe(r, cfg.risk_free);
        c.adv = trailing_volume(panel, a, t, cfg.lookback);
        c.cap = panel.caps[a][t];
        out.push_back(std::move(c));
    }
    return out;
}

void rank_by_sharpe(std::vector<Candidate>& cs) {
    const double lowest = -std::numeric_limits<double>::infinity();
    std::sort(cs.begin(), cs.end(), [&](const Candidate& x, const Candidate& y) {
        double sx = x.label.rolling_sharpe.value_or(lowest), sy = y.label.rolling_sharpe.value_or(lowest);
        if (sx != sy) return sx > sy;
        return x.label.symbol < y.label.symbol;
    });
}

UniverseSnapshot to_snapshot(const PricePanel& panel, std::size_t t, std::vector<Candidate>& cs) {
    UniverseSnapshot snap;
    snap.date = panel.calendar[t];
    for (std::size_t i = 0; i < cs.size(); ++i) snap.members.push_back({i + 1, std::move(cs[i].label)});
    return snap;
}

} // namespace

UniverseSnapshot select_universe_at(const PricePanel& panel, std::size_t t, const SelectionConfig& cfg) {
    auto candidates = label_candidates(panel, t, cfg);
    std::erase_if(candidates, [&](const Candidate& c) {
        bool trend_ok = c.label.label == Trend::up || c.label.label == Trend::volatile_;
        bool liquid = c.adv >= cfg.min_adv;
        bool large = is_missing(c.cap) ? cfg.min_cap == 0.0 : c.cap >= cfg.min_cap;
        return !(trend_ok && liquid && large);
    });
    if (candidates.empty())
        throw Error(ErrorCode::EmptyUniverse, "no asset survives the screen on " + panel.calendar[t].to_string());
    rank_by_sharpe(candidates);
    if (candidates.size() > cfg.top_n) candidates.resize(cfg.top_n);
    return to_snapshot(panel, t, candidates);
}

UniverseSnapshot select_universe(const PricePanel& panel, const Date& date, const SelectionConfig& cfg) {
    auto t = panel.date_index(date);
    if (!t) throw Error(ErrorCode::NoDataAtDate, date.to_string() + " is not in the panel calendar");
    return select_universe_at(panel, *t, cfg);
}

UniverseSnapshot liquid_universe_at(const PricePanel& panel, std::size_t t, const SelectionConfig& cfg) {
    auto candidates = label_candidates(panel, t, cfg);
    if (candidates.empty())
        throw Error(ErrorCode::EmptyUniverse, "no asset has a complete window on " + panel.calendar[t].to_string());
    std::sort(candidates.begin(), candidates.end(),
              [](const Candidate& x, const Candidate& y) { return x.label.symbol < y.label.symbol; });
    return to_snapshot(panel, t, candidates);
}

} // namespace sharpefolio
