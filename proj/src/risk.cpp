#include "sharpefolio/risk.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "sharpefolio/error.hpp"
#include "sharpefolio/format.hpp"

namespace sharpefolio {

RiskConfig RiskConfig::standard() {
    return RiskConfig{{{0.06, 0.0}, {0.04, 0.6}, {0.02, 0.8}}, 1, true};
}

RiskConfig RiskConfig::conservative() {
    return RiskConfig{{{0.06, 0.0}, {0.04, 0.4}, {0.02, 0.8}}, 1, true};
}

void RiskConfig::validate() const {
    for (std::size_t i = 0; i < tiers.size(); ++i) {
        const auto& t = tiers[i];
        if (!(t.threshold >= 0.0 && t.threshold <= 1.0 && t.exposure >= 0.0 && t.exposure <= 1.0))
            throw Error(ErrorCode::ConfigInvalid, "risk tiers must have threshold and exposure in [0, 1]");
        if (i > 0 && !(t.threshold < tiers[i - 1].threshold))
            throw Error(ErrorCode::ConfigInvalid, "risk tier thresholds must be strictly decreasing");
        if (i > 0 && !(t.exposure >= tiers[i - 1].exposure))
            throw Error(ErrorCode::ConfigInvalid,
                        "risk tier exposures must be non-decreasing as thresholds decrease");
    }
}

double tier_exposure(double drawdown, const RiskConfig& cfg) {
    for (const auto& tier : cfg.tiers)
        if (drawdown >= tier.threshold) return tier.exposure;
    return 1.0;
}

RiskState update(const RiskState& state, double equity, const RiskConfig& cfg) {
    if (!(equity > 0.0)) throw Error(ErrorCode::NonPositiveEquity, "equity must be positive");
    RiskState next = state;
    next.peak = std::max(state.peak, equity);
    next.drawdown = (next.peak - equity) / next.peak;
    if (state.cooldown_remaining > 0) {
        next.cooldown_remaining = state.cooldown_remaining - 1;
        next.exposure = 0.0;
        return next;
    }
    next.exposure = 1.0;
    for (std::size_t i = 0; i < cfg.tiers.size(); ++i) {
        if (next.drawdown >= cfg.tiers[i].threshold) {
            next.exposure = cfg.tiers[i].exposure;
            if (i == 0) next.cooldown_remaining = cfg.cooldown_days;
            break;
        }
    }
    return next;
}

double signed_drawdown(std::span<const double> equity_curve, std::size_t t) {
    if (t >= equity_curve.size())
        throw Error(ErrorCode::IndexOutOfRange, "index " + std::to_string(t) + " outside the equity curve");
    double peak = *std::max_element(equity_curve.begin(), equity_curve.begin() + static_cast<std::ptrdiff_t>(t) + 1);
    return (equity_curve[t] - peak) / peak;
}

void write_risk_trace(std::ostream& out, const std::vector<RiskTraceRow>& rows) {
    out << "date,equity,peak,dd,exposure,cooldown\n";
    for (const auto& r : rows)
        out << r.date.to_string() << ',' << format_number(r.equity) << ',' << format_number(r.state.peak) << ','
            << format_number(r.state.drawdown) << ',' << format_number(r.state.exposure) << ','
            << r.state.cooldown_remaining << '\n';
}

} // namespace sharpefolio
