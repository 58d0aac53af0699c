#include "sharpefolio/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "sharpefolio/detail/rng.hpp"

namespace sharpefolio {

using detail::Rng;

std::vector<Date> business_days(std::size_t count) {
    std::vector<Date> out;
    out.reserve(count);
    std::chrono::sys_days d = std::chrono::year{2022} / std::chrono::January / 3;
    while (out.size() < count) {
        std::chrono::weekday wd{d};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) out.push_back(Date(d));
        d += std::chrono::days{1};
    }
    return out;
}

namespace {

struct AssetModel {
    std::string symbol;
    double beta = 1.0;
    double drift = 0.0;
    double vol = 0.015;
    double start_price = 50.0;
    double shares = 1e8;
    double base_volume = 1e6;
    std::size_t listed = 0;
    double gap_rate = 0.0;
};

std::string ticker(std::size_t i) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "S%03zu", i);
    return buf;
}

} // namespace

PricePanel make_synthetic_panel(const SyntheticSpec& spec) {
    Rng rng(spec.seed);
    PricePanel panel;
    panel.calendar = business_days(spec.days);

    std::vector<AssetModel> models;
    const std::size_t plain = spec.planted && spec.assets >= 3 ? spec.assets - 3 : spec.assets;
    for (std::size_t i = 0; i < plain; ++i) {
        AssetModel m;
        m.symbol = ticker(i);
        m.beta = 0.6 + 0.8 * rng.unit();
        m.drift = -0.0002 + 0.0006 * rng.unit();
        m.vol = 0.010 + 0.015 * rng.unit();
        m.start_price = 10.0 + 90.0 * rng.unit();
        const double size = std::clamp(std::exp(rng.normal()), 0.1, 5.0);
        m.shares = 1e8 * size / m.start_price;
        m.base_volume = 1e6 * size * std::exp(0.5 * rng.normal());
        models.push_back(m);
    }
    if (spec.planted && spec.assets >= 3) {
        AssetModel lead;
        lead.symbol = kPlantedSymbol;
        lead.beta = 0.2;
        lead.drift = 0.002;
        lead.vol = 0.004;
        lead.start_price = 40.0;
        lead.shares = 1e9 / lead.start_price;
        lead.base_volume = 2e7;
        models.push_back(lead);

        AssetModel gaps;
        gaps.symbol = kGappySymbol;
        gaps.drift = 0.0002;
        gaps.start_price = 25.0;
        gaps.shares = 4e6;
        gaps.base_volume = 5e5;
        gaps.listed = spec.days / 25;
        gaps.gap_rate = 0.03;
        models.push_back(gaps);

        AssetModel thin;
        thin.symbol = kThinSymbol;
        thin.drift = 0.0003;
        thin.vol = 0.02;
        thin.start_price = 15.0;
        thin.shares = 1e6;
        thin.base_volume = 500.0;
        models.push_back(thin);
    }
    std::sort(models.begin(), models.end(), [](const auto& a, const auto& b) { return a.symbol < b.symbol; });

    // Market regimes of 60-180 bars: bull, bear or flat.
    std::vector<double> market(spec.days, 0.0);
    {
        constexpr double kRegimeDrift[] = {0.0008, -0.0008, 0.0};
        std::size_t t = 0;
        std::size_t regime = 0;
        while (t < spec.days) {
            std::size_t len = 60 + rng.index(121);
            for (std::size_t k = 0; k < len && t < spec.days; ++k, ++t)
                market[t] = kRegimeDrift[regime] + 0.01 * rng.normal();
            regime = (regime + 1 + rng.index(2)) % 3;
        }
    }

    for (const auto& m : models) {
        std::vector<double> closes(spec.days, kMissing), volumes(spec.days, kMissing), caps(spec.days, kMissing);
        double price = m.start_price;
        for (std::size_t t = 0; t < spec.days; ++t) {
            if (t > 0) price *= std::exp(m.drift + m.beta * market[t] + m.vol * rng.normal());
            const double vol_draw = std::exp(0.3 * rng.normal());
            const bool gap = rng.chance(m.gap_rate);
            if (t < m.listed || (t > m.listed && gap)) continue;
            closes[t] = std::round(price * 10000.0) / 10000.0;
            volumes[t] = std::round(m.base_volume * vol_draw);
            caps[t] = std::round(m.shares * closes[t]);
        }
        panel.assets.push_back(m.symbol);
        panel.closes.push_back(std::move(closes));
        panel.volumes.push_back(std::move(volumes));
        panel.caps.push_back(std::move(caps));
    }
    return panel;
}

PricePanel make_rigged_gp_panel(std::size_t days, std::uint64_t seed) {
    Rng rng(seed);
    PricePanel panel;
    panel.calendar = business_days(days);
    constexpr std::size_t kAssets = 5;
    for (std::size_t a = 0; a < kAssets; ++a) {
        panel.assets.push_back("R" + std::to_string(a));
        panel.closes.emplace_back(days);
        panel.volumes.emplace_back(days);
        panel.caps.emplace_back(days);
    }
    std::vector<double> price(kAssets, 100.0);
    for (std::size_t t = 0; t < days; ++t) {
        for (std::size_t a = 0; a < kAssets; ++a) {
            if (t > 0) {
                const double r = (a == t % 3 ? 0.02 : -0.01) + 0.002 * rng.normal();
                price[a] *= 1.0 + r;
            }
            panel.closes[a][t] = price[a];
            panel.volumes[a][t] = 1e6;
            panel.caps[a][t] = 1e8 * price[a];
        }
    }
    return panel;
}

} // namespace sharpefolio
