#pragma once

#include <cmath>
#include <cstddef>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sharpefolio/date.hpp"

namespace sharpefolio {

/// Missing-bar marker used in every aligned series.
inline constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();
inline bool is_missing(double v) { return std::isnan(v); }

struct Bar {
    Date date;
    double close = 0.0;
    double volume = 0.0;
    std::optional<double> market_cap;
};

/// Daily closes, volumes and caps for several assets over one shared calendar.
///
/// Series are indexed `[asset][calendar position]`. Before cleaning, absent bars
/// hold `kMissing`; after cleaning only a leading gap (pre-listing) may remain.
/// Assets are kept in lexicographic order.
struct PricePanel {
    std::vector<std::string> assets;
    std::vector<Date> calendar;
    std::vector<std::vector<double>> closes;
    std::vector<std::vector<double>> volumes;
    std::vector<std::vector<double>> caps;

    std::size_t asset_count() const { return assets.size(); }
    std::size_t length() const { return calendar.size(); }
    std::optional<std::size_t> asset_index(const std::string& symbol) const;
    std::optional<std::size_t> date_index(const Date& date) const;
    /// Last calendar position with date <= `date`, if any.
    std::optional<std::size_t> index_at_or_before(const Date& date) const;
};

/// Simple close-to-close returns; `returns[a][k]` covers calendar[k] -> calendar[k+1].
struct ReturnPanel {
    std::vector<std::string> assets;
    std::vector<Date> dates; // end date of each return, i.e. calendar[1..]
    std::vector<std::vector<double>> returns;

    std::size_t length() const { return dates.size(); }
};

enum class PanelFormat { csv };

/// Collected notes about rejected assets and filled gaps.
struct Diagnostics {
    std::vector<std::string> messages;
    void note(std::string message) { messages.push_back(std::move(message)); }
};

struct LoadOptions {
    /// When set, assets missing more than this fraction of calendar bars are dropped at load.
    std::optional<double> max_missing_frac;
};

/// Loads `symbol,date,close,volume,market_cap` rows into a union-calendar panel.
///
/// Structural problems (bad header, wrong field count, duplicate symbol/date)
/// raise SchemaViolation naming the line. A row with the right shape but an
/// unusable value (bad date, non-numeric or non-positive close, negative volume)
/// rejects that whole asset and is reported through `diag`.
PricePanel load_panel(const std::filesystem::path& path, PanelFormat format = PanelFormat::csv,
                      const LoadOptions& options = {}, Diagnostics* diag = nullptr);

/// Writes every non-missing bar back out in the load schema.
void write_panel(const PricePanel& panel, const std::filesystem::path& path);

double missing_fraction(const PricePanel& panel, std::size_t asset);
/// Sum of volumes over the whole calendar divided by its length; missing bars count as zero.
double average_daily_volume(const PricePanel& panel, std::size_t asset);

PricePanel clean_panel(const PricePanel& panel, double max_missing_frac, double min_adv,
                       Diagnostics* diag = nullptr);

ReturnPanel to_returns(const PricePanel& panel);

} // namespace sharpefolio
