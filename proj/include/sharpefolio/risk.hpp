#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "sharpefolio/date.hpp"

namespace sharpefolio {

struct DrawdownTier {
    double threshold = 0.0; // drawdown magnitude that activates the tier (>=)
    double exposure = 1.0;  // invested fraction while active
};

struct RiskConfig {
    /// Ordered hardest first: thresholds strictly decreasing.
    std::vector<DrawdownTier> tiers;
    std::size_t cooldown_days = 1;
    bool enabled = true;

    /// 6% -> flat with cooldown, 4% -> 60%, 2% -> 80%.
    static RiskConfig standard();
    /// Same thresholds with the 4-6% band capped at 40%.
    static RiskConfig conservative();
    void validate() const;
};

struct RiskState {
    double peak = 0.0;
    double drawdown = 0.0;
    double exposure = 1.0;
    std::size_t cooldown_remaining = 0;

    friend bool operator==(const RiskState&, const RiskState&) = default;
};

/// Advances the controller by one bar of closing equity.
RiskState update(const RiskState& state, double equity, const RiskConfig& cfg);

/// Exposure the tier table assigns to a drawdown magnitude, ignoring cooldown.
double tier_exposure(double drawdown, const RiskConfig& cfg);

/// (V_t - max_{s<=t} V_s) / max_{s<=t} V_s; zero or negative.
double signed_drawdown(std::span<const double> equity_curve, std::size_t t);

/// One row of the optional controller trace.
struct RiskTraceRow {
    Date date;
    double equity = 0.0;
    RiskState state;
};

/// Writes `date,equity,peak,dd,exposure,cooldown`.
void write_risk_trace(std::ostream& out, const std::vector<RiskTraceRow>& rows);

} // namespace sharpefolio
