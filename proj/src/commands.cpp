#include "sharpefolio/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>

#include "sharpefolio/error.hpp"
#include "sharpefolio/report.hpp"

namespace sharpefolio {

GlobalConfig resolve_config(const std::filesystem::path& config_path, const Overrides& overrides) {
    GlobalConfig cfg = load_config(config_path);
    if (const char* env = std::getenv(kOutputDirEnv); env && *env) cfg.output_dir = env;
    if (overrides.output_dir) cfg.output_dir = *overrides.output_dir;
    if (overrides.seed) {
        cfg.seed = *overrides.seed;
        cfg.gp.seed = *overrides.seed;
    }
    return cfg;
}

std::vector<std::pair<std::string, BacktestReport>> run_strategy_suite(const PricePanel& panel,
                                                                       const GlobalConfig& cfg) {
    std::vector<std::pair<std::string, BacktestReport>> out;
    out.emplace_back(std::string(to_string(cfg.backtest.strategy)), run_backtest(panel, cfg.backtest));
    for (auto s : kAllStrategies) {
        if (s == cfg.backtest.strategy) continue;
        BacktestConfig bench = cfg.backtest;
        bench.strategy = s;
        bench.universe = UniverseMode::liquid;
        bench.risk.enabled = cfg.benchmark_risk;
        out.emplace_back(std::string(to_string(s)), run_backtest(panel, bench));
    }
    return out;
}

namespace {

std::ofstream open_report(const std::filesystem::path& dir, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::MissingFile, "cannot create " + dir.string() + ": " + ec.message());
    std::ofstream f(dir / name);
    if (!f) throw Error(ErrorCode::MissingFile, "cannot write " + (dir / name).string());
    return f;
}

} // namespace

int cmd_backtest(const GlobalConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PricePanel panel = load_configured_panel(cfg);
        auto runs = run_strategy_suite(panel, cfg);
        std::vector<std::pair<std::string, MetricsBlock>> rows;
        for (const auto& [name, rep] : runs) {
            write_strategy_report(cfg.output_dir / name, rep);
            rows.emplace_back(name, rep.metrics);
        }
        auto f = open_report(cfg.output_dir, "comparison.csv");
        write_comparison_csv(f, rows);
        out << "wrote " << runs.size() << " strategy reports to " << cfg.output_dir.string() << '\n';
        return 0;
    });
}

int cmd_select(const GlobalConfig& cfg, const std::string& date, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        auto d = Date::parse(date);
        if (!d) throw Error(ErrorCode::ConfigInvalid, "date must be YYYY-MM-DD, got '" + date + "'");
        const PricePanel panel = load_configured_panel(cfg);
        UniverseSnapshot snap;
        snap.date = *d;
        try {
            snap = select_universe(panel, *d, cfg.backtest.selection);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::EmptyUniverse) throw;
        }
        write_universe_csv(out, snap);
        return 0;
    });
}

int cmd_frontier(const GlobalConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PricePanel panel = load_configured_panel(cfg);
        const std::size_t t = panel.length() - 1;
        const UniverseSnapshot universe = cfg.frontier.universe == UniverseMode::screened
                                              ? select_universe_at(panel, t, cfg.backtest.selection)
                                              : liquid_universe_at(panel, t, cfg.backtest.selection);
        const std::size_t window = cfg.backtest.effective_stats_window();
        if (t < window + 1) throw Error(ErrorCode::InsufficientHistory, "panel shorter than the stats window");
        const auto symbols = universe.symbols();
        const AssetStats stats =
            estimate_stats(to_returns(panel), symbols, t - 1, window, cfg.backtest.selection.risk_free);
        const auto lambdas = log_spaced(cfg.frontier.lambda_min, cfg.frontier.lambda_max, cfg.frontier.points);
        const auto points = efficient_frontier(stats, lambdas, cfg.backtest.optimizer);

        std::size_t failed = 0;
        for (const auto& p : points)
            if (!p.weights) ++failed;
        if (failed == points.size())
            throw Error(ErrorCode::Infeasible, points.front().error.value_or("no frontier point could be solved"));
        auto f = open_report(cfg.output_dir, "frontier.csv");
        write_frontier_csv(f, symbols, points);
        for (const auto& p : points)
            if (p.error) err << "warning: lambda " << p.lambda << ": " << *p.error << '\n';
        out << "wrote " << points.size() << " frontier points over " << symbols.size() << " assets to "
            << (cfg.output_dir / "frontier.csv").string() << '\n';
        return 0;
    });
}

int cmd_evolve(const GlobalConfig& cfg, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const PricePanel panel = load_configured_panel(cfg);
        const EvolveResult result = evolve(panel, cfg.gp);
        auto f = open_report(cfg.output_dir, "alphas.csv");
        write_alphas_csv(f, result.population);
        const auto& best = result.population.front();
        out << "champion " << best.expr.to_string() << " fitness " << best.score.fitness << '\n';
        return 0;
    });
}

int cmd_metrics(const std::filesystem::path& equity_csv, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const auto equity = read_equity_csv(equity_csv);
        const MetricsBlock m = compute_metrics(equity, {}, std::nullopt);
        out << to_json(m).dump(2) << '\n';
        return 0;
    });
}

} // namespace sharpefolio
