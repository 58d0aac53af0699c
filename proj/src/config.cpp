#include "sharpefolio/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sharpefolio/error.hpp"

namespace sharpefolio {

namespace pt = boost::property_tree;

namespace {

[[noreturn]] void invalid(const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); }

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t");
    return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, sep)) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double to_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    auto t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size()) invalid(key + ": expected a number, got '" + text + "'");
    return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    auto t = trim(text);
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || ptr != t.data() + t.size())
        invalid(key + ": expected a non-negative integer, got '" + text + "'");
    return v;
}

bool to_bool(const std::string& key, const std::string& text) {
    auto t = trim(text);
    if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
    if (t == "false" || t == "0" || t == "no" || t == "off") return false;
    invalid(key + ": expected true or false, got '" + text + "'");
}

Date to_date(const std::string& key, const std::string& text) {
    auto d = Date::parse(trim(text));
    if (!d) invalid(key + ": expected YYYY-MM-DD, got '" + text + "'");
    return *d;
}

// The ini parser only knows whole-line comments; drop a `;` or `#` that follows whitespace.
std::string strip_inline_comments(const std::string& text) {
    std::istringstream in(text);
    std::string line, out;
    while (std::getline(in, line)) {
        for (std::size_t i = 1; i < line.size(); ++i)
            if ((line[i] == ';' || line[i] == '#') && (line[i - 1] == ' ' || line[i - 1] == '\t')) {
                line.erase(i);
                break;
            }
        out += line;
        out += '\n';
    }
    return out;
}

// Walks one section, handing each key to `apply`, which returns false for unknown keys.
template <class F>
void section(const pt::ptree& tree, const std::string& name, F&& apply) {
    for (const auto& [key, node] : tree) {
        const std::string full = name.empty() ? key : name + "." + key;
        if (!node.empty()) invalid("unexpected nested section " + full);
        if (!apply(key, full, node.data())) invalid("unknown key " + full);
    }
}

std::vector<DrawdownTier> parse_tiers(const std::string& key, const std::string& text) {
    std::vector<DrawdownTier> tiers;
    for (const auto& item : split(text, ',')) {
        auto colon = item.find(':');
        if (colon == std::string::npos) invalid(key + ": tier '" + item + "' must be threshold:exposure");
        tiers.push_back({to_double(key, item.substr(0, colon)), to_double(key, item.substr(colon + 1))});
    }
    return tiers;
}

} // namespace

void GlobalConfig::validate() const {
    if (!(data.max_missing_frac >= 0.0 && data.max_missing_frac < 1.0))
        invalid("data.max_missing_frac must lie in [0, 1)");
    if (!(data.min_adv >= 0.0)) invalid("data.min_adv must be >= 0");
    backtest.validate();
    gp.validate();
    if (frontier.points < 1) invalid("frontier.points must be >= 1");
    if (!(frontier.lambda_min > 0.0 && frontier.lambda_min <= frontier.lambda_max))
        invalid("frontier.lambda_min must satisfy 0 < lambda_min <= lambda_max");
}

GlobalConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream in(strip_inline_comments(text));
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        invalid(std::string("config syntax: ") + e.message() + " on line " + std::to_string(e.line()));
    }

    GlobalConfig cfg;
    auto& bt = cfg.backtest;
    std::optional<RiskConfig> preset;
    std::optional<std::vector<DrawdownTier>> tiers;
    std::optional<std::size_t> cooldown;
    std::optional<bool> risk_enabled;

    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            if (name == "seed") {
                cfg.seed = to_uint(name, node.data());
            } else if (name == "output_dir") {
                cfg.output_dir = trim(node.data());
            } else {
                invalid("unknown key " + name);
            }
            continue;
        }
        if (name == "data") {
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "path") cfg.data.path = trim(v);
                else if (k == "format") {
                    if (trim(v) != "csv") invalid(full + ": unsupported format '" + v + "'");
                } else if (k == "max_missing_frac") cfg.data.max_missing_frac = to_double(full, v);
                else if (k == "min_adv") cfg.data.min_adv = to_double(full, v);
                else return false;
                return true;
            });
        } else if (name == "selection") {
            auto& s = bt.selection;
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "top_n") s.top_n = to_uint(full, v);
                else if (k == "lookback") s.lookback = to_uint(full, v);
                else if (k == "tau1") s.tau1 = to_double(full, v);
                else if (k == "tau2") s.tau2 = to_double(full, v);
                else if (k == "risk_free") s.risk_free = to_double(full, v);
                else if (k == "min_adv") s.min_adv = to_double(full, v);
                else if (k == "min_cap") s.min_cap = to_double(full, v);
                else return false;
                return true;
            });
        } else if (name == "optimizer") {
            auto& o = bt.optimizer;
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "lambda") o.lambda = to_double(full, v);
                else if (k == "r_min") o.r_min = to_double(full, v);
                else if (k == "lower") o.default_bounds.lower = to_double(full, v);
                else if (k == "upper") o.default_bounds.upper = to_double(full, v);
                else if (k == "asset_bounds") {
                    for (const auto& item : split(v, ',')) {
                        auto parts = split(item, ':');
                        if (parts.size() != 3) invalid(full + ": entry '" + item + "' must be symbol:lower:upper");
                        o.asset_bounds[parts[0]] = {to_double(full, parts[1]), to_double(full, parts[2])};
                    }
                } else if (k == "turnover_cap") o.turnover_cap = to_double(full, v);
                else if (k == "blend_alpha") o.blend_alpha = to_double(full, v);
                else if (k == "risk_free") o.risk_free = to_double(full, v);
                else if (k == "max_iterations") o.max_iterations = static_cast<int>(to_uint(full, v));
                else if (k == "tolerance") o.tolerance = to_double(full, v);
                else return false;
                return true;
            });
        } else if (name == "risk") {
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "preset") {
                    auto p = trim(v);
                    if (p == "standard") preset = RiskConfig::standard();
                    else if (p == "conservative") preset = RiskConfig::conservative();
                    else invalid(full + ": expected standard or conservative, got '" + v + "'");
                } else if (k == "tiers") tiers = parse_tiers(full, v);
                else if (k == "cooldown_days") cooldown = to_uint(full, v);
                else if (k == "enabled") risk_enabled = to_bool(full, v);
                else return false;
                return true;
            });
        } else if (name == "backtest") {
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "start") bt.start = to_date(full, v);
                else if (k == "end") bt.end = to_date(full, v);
                else if (k == "initial_capital") bt.initial_capital = to_double(full, v);
                else if (k == "cost_bps_per_side") bt.cost_bps_per_side = to_double(full, v);
                else if (k == "rebalance") {
                    if (trim(v) != "daily") invalid(full + ": only daily rebalancing is supported");
                } else if (k == "strategy") {
                    auto s = parse_strategy(trim(v));
                    if (!s) invalid(full + ": unknown strategy '" + v + "'");
                    bt.strategy = *s;
                } else if (k == "universe") {
                    auto m = parse_universe_mode(trim(v));
                    if (!m) invalid(full + ": expected screened or liquid, got '" + v + "'");
                    bt.universe = *m;
                } else if (k == "stats_window") bt.stats_window = to_uint(full, v);
                else if (k == "adv_cap_fraction") bt.adv_cap_fraction = to_double(full, v);
                else if (k == "benchmark_risk") cfg.benchmark_risk = to_bool(full, v);
                else if (k == "risk_free") bt.metrics.risk_free = to_double(full, v);
                else if (k == "tail_alpha") bt.metrics.tail_alpha = to_double(full, v);
                else return false;
                return true;
            });
        } else if (name == "gp") {
            auto& g = cfg.gp;
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "population") g.population = to_uint(full, v);
                else if (k == "generations") g.generations = to_uint(full, v);
                else if (k == "max_depth") g.max_depth = to_uint(full, v);
                else if (k == "mutation_rate") g.mutation_rate = to_double(full, v);
                else if (k == "crossover_rate") g.crossover_rate = to_double(full, v);
                else if (k == "w_sharpe") g.fitness_weights.sharpe = to_double(full, v);
                else if (k == "w_turnover") g.fitness_weights.turnover = to_double(full, v);
                else if (k == "w_mdd") g.fitness_weights.mdd = to_double(full, v);
                else if (k == "tournament_size") g.tournament_size = to_uint(full, v);
                else if (k == "top_quantile") g.top_quantile = to_double(full, v);
                else if (k == "cost_bps_per_side") g.cost_bps_per_side = to_double(full, v);
                else if (k == "warmup") g.warmup = to_uint(full, v);
                else if (k == "hill_climb_patience") g.hill_climb_patience = to_uint(full, v);
                else if (k == "hill_climb_max_steps") g.hill_climb_max_steps = to_uint(full, v);
                else if (k == "seeds") {
                    for (const auto& expr : split(v, ';')) {
                        try {
                            g.seeds.push_back(AlphaExpr::parse(expr));
                        } catch (const Error& e) {
                            invalid(full + ": " + e.what());
                        }
                    }
                } else return false;
                return true;
            });
        } else if (name == "frontier") {
            auto& f = cfg.frontier;
            section(node, name, [&](const std::string& k, const std::string& full, const std::string& v) {
                if (k == "points") f.points = to_uint(full, v);
                else if (k == "lambda_min") f.lambda_min = to_double(full, v);
                else if (k == "lambda_max") f.lambda_max = to_double(full, v);
                else if (k == "universe") {
                    auto m = parse_universe_mode(trim(v));
                    if (!m) invalid(full + ": expected screened or liquid, got '" + v + "'");
                    f.universe = *m;
                } else return false;
                return true;
            });
        } else {
            invalid("unknown section [" + name + "]");
        }
    }

    RiskConfig risk = preset.value_or(RiskConfig::standard());
    if (tiers) risk.tiers = *tiers;
    if (cooldown) risk.cooldown_days = *cooldown;
    if (risk_enabled) risk.enabled = *risk_enabled;
    bt.risk = risk;
    cfg.gp.seed = cfg.seed;

    if (cfg.data.path.empty()) invalid("data.path is required");
    if (cfg.data.path.is_relative() && !base_dir.empty()) cfg.data.path = base_dir / cfg.data.path;
    cfg.validate();
    return cfg;
}

GlobalConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) invalid("cannot read config file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.parent_path());
}

PricePanel load_configured_panel(const GlobalConfig& cfg, Diagnostics* diag) {
    LoadOptions opts;
    opts.max_missing_frac = cfg.data.max_missing_frac;
    PricePanel raw = load_panel(cfg.data.path, cfg.data.format, opts, diag);
    PricePanel clean = clean_panel(raw, cfg.data.max_missing_frac, cfg.data.min_adv, diag);
    if (clean.asset_count() == 0) throw Error(ErrorCode::EmptyPanel, "no asset survived cleaning");
    return clean;
}

} // namespace sharpefolio
