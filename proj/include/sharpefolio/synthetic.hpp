#pragma once

#include <cstddef>
#include <cstdint>

#include "sharpefolio/market_data.hpp"

namespace sharpefolio {

/// Symbol of the planted high-Sharpe, low-volatility asset with the largest cap and volume.
inline constexpr const char* kPlantedSymbol = "LEAD";
/// Listed late and missing a few interior bars.
inline constexpr const char* kGappySymbol = "GAPS";
/// Tiny traded volume.
inline constexpr const char* kThinSymbol = "THIN";

struct SyntheticSpec {
    std::size_t assets = 20;
    std::size_t days = 700;
    std::uint64_t seed = 3;
    /// Include LEAD, GAPS and THIN among `assets`.
    bool planted = true;
};

/// One-factor market with alternating bull, bear and flat regimes. Missing bars are NaN.
PricePanel make_synthetic_panel(const SyntheticSpec& spec = {});

/// Five assets where the day's winner cycles with period 3: the winner gains 2%,
/// the others lose 1%, plus 0.2% noise. `(delay returns 1)` then picks the next winner.
PricePanel make_rigged_gp_panel(std::size_t days = 300, std::uint64_t seed = 11);

/// Business-day calendar starting on 2022-01-03.
std::vector<Date> business_days(std::size_t count);

} // namespace sharpefolio
