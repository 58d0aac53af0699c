#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "sharpefolio/detail/rng.hpp"
#include "sharpefolio/market_data.hpp"
#include "sharpefolio/synthetic.hpp"

namespace testing {

using sharpefolio::PricePanel;

/// Panel on a business-day calendar. Volumes default to 1e6 and caps to close * 1e6.
inline PricePanel panel_of(const std::vector<std::string>& symbols, const std::vector<std::vector<double>>& closes,
                           std::vector<std::vector<double>> volumes = {},
                           std::vector<std::vector<double>> caps = {}) {
    PricePanel p;
    p.assets = symbols;
    p.calendar = sharpefolio::business_days(closes.front().size());
    p.closes = closes;
    if (volumes.empty())
        for (const auto& c : closes) volumes.emplace_back(c.size(), 1e6);
    if (caps.empty())
        for (const auto& c : closes) {
            std::vector<double> cap;
            for (double x : c) cap.push_back(x * 1e6);
            caps.push_back(cap);
        }
    p.volumes = volumes;
    p.caps = caps;
    return p;
}

/// Geometric random walk closes.
inline std::vector<double> random_walk(sharpefolio::detail::Rng& rng, std::size_t n, double drift, double vol,
                                       double start = 100.0) {
    std::vector<double> out{start};
    while (out.size() < n) out.push_back(out.back() * std::exp(drift + vol * rng.normal()));
    return out;
}

inline std::filesystem::path temp_path(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "sharpefolio-tests";
    std::filesystem::create_directories(dir);
    return dir / name;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream(path) << text;
}

inline std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

} // namespace testing
