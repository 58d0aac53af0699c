#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sharpefolio/commands.hpp"

using namespace sharpefolio;

int main(int argc, char** argv) {
    CLI::App app{"Sharpe-screened portfolio research tool"};
    app.require_subcommand(1);

    std::string config;
    std::string date;
    std::string equity;
    Overrides overrides;
    std::uint64_t seed = 0;
    std::string output_dir;

    auto with_config = [&](CLI::App* sub) {
        sub->add_option("config", config, "INI config file")->required();
        sub->add_option("--seed", seed, "Override the random seed");
        sub->add_option("--output-dir", output_dir, "Override the report directory");
        return sub;
    };
    auto* backtest = with_config(app.add_subcommand("backtest", "Run the strategy and its benchmarks"));
    auto* select = with_config(app.add_subcommand("select", "Print the universe on a date"));
    select->add_option("date", date, "YYYY-MM-DD")->required();
    auto* frontier = with_config(app.add_subcommand("frontier", "Write the efficient frontier"));
    auto* evolve_cmd = with_config(app.add_subcommand("evolve", "Evolve alpha expressions"));
    auto* metrics = app.add_subcommand("metrics", "Print metrics for an equity curve");
    metrics->add_option("equity_csv", equity, "CSV with an equity column")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ErrorClass::Config);
    }

    if (metrics->parsed()) return cmd_metrics(equity, std::cout, std::cerr);

    for (auto* sub : {backtest, select, frontier, evolve_cmd})
        if (sub->parsed()) {
            if (sub->count("--seed")) overrides.seed = seed;
            if (sub->count("--output-dir")) overrides.output_dir = output_dir;
        }

    GlobalConfig cfg;
    if (int code = guarded(std::cerr, [&] {
            cfg = resolve_config(config, overrides);
            return 0;
        }))
        return code;

    if (backtest->parsed()) return cmd_backtest(cfg, std::cout, std::cerr);
    if (select->parsed()) return cmd_select(cfg, date, std::cout, std::cerr);
    if (frontier->parsed()) return cmd_frontier(cfg, std::cout, std::cerr);
    return cmd_evolve(cfg, std::cout, std::cerr);
}
