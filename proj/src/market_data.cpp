#include "sharpefolio/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "sharpefolio/error.hpp"
#include "sharpefolio/format.hpp"

namespace sharpefolio {

namespace {

constexpr std::string_view kHeader = "symbol,date,close,volume,market_cap";

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t begin = 0;
    while (true) {
        auto pos = line.find(',', begin);
        fields.push_back(line.substr(begin, pos == std::string_view::npos ? pos : pos - begin));
        if (pos == std::string_view::npos) break;
        begin = pos + 1;
    }
    return fields;
}

std::optional<double> parse_finite(std::string_view text) {
    if (text.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size() || !std::isfinite(value))
        return std::nullopt;
    return value;
}

struct RawAsset {
    std::map<Date, Bar> bars;
    std::optional<std::string> rejection;
};

} // namespace

std::optional<std::size_t> PricePanel::asset_index(const std::string& symbol) const {
    auto it = std::lower_bound(assets.begin(), assets.end(), symbol);
    if (it == assets.end() || *it != symbol) return std::nullopt;
    return static_cast<std::size_t>(it - assets.begin());
}

std::optional<std::size_t> PricePanel::date_index(const Date& date) const {
    auto it = std::lower_bound(calendar.begin(), calendar.end(), date);
    if (it == calendar.end() || *it != date) return std::nullopt;
    return static_cast<std::size_t>(it - calendar.begin());
}

std::optional<std::size_t> PricePanel::index_at_or_before(const Date& date) const {
    auto it = std::upper_bound(calendar.begin(), calendar.end(), date);
    if (it == calendar.begin()) return std::nullopt;
    return static_cast<std::size_t>(it - calendar.begin()) - 1;
}

PricePanel load_panel(const std::filesystem::path& path, PanelFormat format,
                      const LoadOptions& options, Diagnostics* diag) {
    if (format != PanelFormat::csv) throw Error(ErrorCode::SchemaViolation, "unsupported panel format");
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());

    std::string line;
    std::size_t line_no = 0;
    bool saw_header = false;
    std::map<std::string, RawAsset> raw;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!saw_header) {
            if (line.empty()) continue;
            if (line != kHeader)
                throw Error(ErrorCode::SchemaViolation,
                            "line 1: expected header '" + std::string(kHeader) + "'");
            saw_header = true;
            continue;
        }
        if (line.empty()) continue;
        auto fields = split_commas(line);
        const std::string where = path.filename().string() + " line " + std::to_string(line_no);
        if (fields.size() != 5)
            throw Error(ErrorCode::SchemaViolation,
                        where + ": expected 5 fields, got " + std::to_string(fields.size()));
        if (fields[0].empty()) throw Error(ErrorCode::SchemaViolation, where + ": empty symbol");

        auto& asset = raw[std::string(fields[0])];
        auto date = Date::parse(fields[1]);
        auto close = parse_finite(fields[2]);
        auto volume = parse_finite(fields[3]);
        std::optional<double> cap;
        bool cap_ok = true;
        if (!fields[4].empty()) {
            cap = parse_finite(fields[4]);
            cap_ok = cap && *cap >= 0.0;
        }
        std::string problem;
        if (!date) problem = "unparseable date '" + std::string(fields[1]) + "'";
        else if (!close || *close <= 0.0) problem = "close must be a positive number";
        else if (!volume || *volume < 0.0) problem = "volume must be a non-negative number";
        else if (!cap_ok) problem = "market_cap must be empty or a non-negative number";
        if (!problem.empty()) {
            if (!asset.rejection) asset.rejection = where + ": " + problem;
            continue;
        }
        if (asset.bars.count(*date))
            throw Error(ErrorCode::SchemaViolation,
                        where + ": duplicate row for " + std::string(fields[0]) + " on " + date->to_string());
        asset.bars.emplace(*date, Bar{*date, *close, *volume, cap});
    }

    if (!saw_header) throw Error(ErrorCode::EmptyPanel, path.string() + " is empty");

    std::set<Date> calendar;
    for (auto& [symbol, asset] : raw) {
        if (asset.rejection) {
            if (diag) diag->note("rejected " + symbol + " (" + *asset.rejection + ")");
            continue;
        }
        for (auto& [date, bar] : asset.bars) calendar.insert(date);
    }

    PricePanel panel;
    panel.calendar.assign(calendar.begin(), calendar.end());
    const std::size_t n = panel.calendar.size();
    for (auto& [symbol, asset] : raw) {
        if (asset.rejection || asset.bars.empty()) continue;
        std::vector<double> closes(n, kMissing), volumes(n, kMissing), caps(n, kMissing);
        for (auto& [date, bar] : asset.bars) {
            auto idx = *panel.date_index(date);
            closes[idx] = bar.close;
            volumes[idx] = bar.volume;
            if (bar.market_cap) caps[idx] = *bar.market_cap;
        }
        panel.assets.push_back(symbol);
        panel.closes.push_back(std::move(closes));
        panel.volumes.push_back(std::move(volumes));
        panel.caps.push_back(std::move(caps));
    }

    if (options.max_missing_frac) {
        PricePanel kept;
        kept.calendar = panel.calendar;
        for (std::size_t a = 0; a < panel.asset_count(); ++a) {
            double frac = missing_fraction(panel, a);
            if (frac > *options.max_missing_frac) {
                if (diag)
                    diag->note("dropped " + panel.assets[a] + ": missing fraction " + format_number(frac));
                continue;
            }
            kept.assets.push_back(panel.assets[a]);
            kept.closes.push_back(std::move(panel.closes[a]));
            kept.volumes.push_back(std::move(panel.volumes[a]));
            kept.caps.push_back(std::move(panel.caps[a]));
        }
        panel = std::move(kept);
    }

    if (panel.assets.empty() || panel.calendar.empty())
        throw Error(ErrorCode::EmptyPanel, "no usable assets in " + path.string());
    return panel;
}

void write_panel(const PricePanel& panel, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
    out << kHeader << '\n';
    for (std::size_t a = 0; a < panel.asset_count(); ++a) {
        for (std::size_t t = 0; t < panel.length(); ++t) {
            if (is_missing(panel.closes[a][t])) continue;
            double volume = is_missing(panel.volumes[a][t]) ? 0.0 : panel.volumes[a][t];
            out << panel.assets[a] << ',' << panel.calendar[t].to_string() << ','
                << format_number(panel.closes[a][t]) << ',' << format_number(volume) << ','
                << format_number(panel.caps[a][t]) << '\n';
        }
    }
}

double missing_fraction(const PricePanel& panel, std::size_t asset) {
    if (panel.length() == 0) return 1.0;
    auto missing = std::count_if(panel.closes[asset].begin(), panel.closes[asset].end(),
                                 [](double v) { return is_missing(v); });
    return static_cast<double>(missing) / static_cast<double>(panel.length());
}

double average_daily_volume(const PricePanel& panel, std::size_t asset) {
    if (panel.length() == 0) return 0.0;
    double sum = 0.0;
    for (double v : panel.volumes[asset])
        if (!is_missing(v)) sum += v;
    return sum / static_cast<double>(panel.length());
}

PricePanel clean_panel(const PricePanel& panel, double max_missing_frac, double min_adv,
                       Diagnostics* diag) {
    if (!(max_missing_frac >= 0.0 && max_missing_frac < 1.0))
        throw Error(ErrorCode::ConfigInvalid, "max_missing_frac must lie in [0, 1)");
    if (!(min_adv >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "min_adv must be >= 0");

    PricePanel out;
    out.calendar = panel.calendar;
    for (std::size_t a = 0; a < panel.asset_count(); ++a) {
        const auto& symbol = panel.assets[a];
        double frac = missing_fraction(panel, a);
        if (frac > max_missing_frac) {
            if (diag) diag->note("dropped " + symbol + ": missing fraction " + format_number(frac));
            continue;
        }
        double adv = average_daily_volume(panel, a);
        if (adv < min_adv) {
            if (diag) diag->note("dropped " + symbol + ": average daily volume " + format_number(adv));
            continue;
        }
        auto closes = panel.closes[a];
        auto volumes = panel.volumes[a];
        auto caps = panel.caps[a];
        std::size_t filled = 0;
        double last_close = kMissing;
        double last_cap = kMissing;
        for (std::size_t t = 0; t < closes.size(); ++t) {
            if (is_missing(closes[t])) {
                if (!is_missing(last_close)) {
                    closes[t] = last_close;
                    caps[t] = last_cap;
                    ++filled;
                }
                volumes[t] = 0.0;
            } else {
                last_close = closes[t];
                last_cap = caps[t];
            }
        }
        if (filled > 0 && diag)
            diag->note("filled " + std::to_string(filled) + " missing bars for " + symbol);
        out.assets.push_back(symbol);
        out.closes.push_back(std::move(closes));
        out.volumes.push_back(std::move(volumes));
        out.caps.push_back(std::move(caps));
    }
    if (out.assets.empty()) throw Error(ErrorCode::EmptyPanel, "no asset survived cleaning");
    return out;
}

ReturnPanel to_returns(const PricePanel& panel) {
    if (panel.length() < 2)
        throw Error(ErrorCode::InsufficientHistory, "need at least 2 dates to compute returns");
    ReturnPanel out;
    out.assets = panel.assets;
    out.dates.assign(panel.calendar.begin() + 1, panel.calendar.end());
    out.returns.reserve(panel.asset_count());
    for (const auto& closes : panel.closes) {
        std::vector<double> r(closes.size() - 1);
        for (std::size_t t = 1; t < closes.size(); ++t)
            r[t - 1] = closes[t] / closes[t - 1] - 1.0; // NaN propagates from missing bars
        out.returns.push_back(std::move(r));
    }
    return out;
}

} // namespace sharpefolio
