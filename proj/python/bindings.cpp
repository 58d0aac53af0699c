#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/backtest.hpp"
#include "sharpefolio/error.hpp"
#include "sharpefolio/metrics.hpp"
#include "sharpefolio/synthetic.hpp"

namespace py = pybind11;
using namespace sharpefolio;

namespace {

py::dict metrics_dict(const MetricsBlock& m) {
    py::dict d;
    for (const auto& [name, value] : fields(m)) {
        if (value) d[py::str(std::string(name))] = *value;
        else d[py::str(std::string(name))] = py::none();
    }
    return d;
}

std::vector<std::string> date_strings(const std::vector<Date>& dates) {
    std::vector<std::string> out;
    out.reserve(dates.size());
    for (const auto& d : dates) out.push_back(d.to_string());
    return out;
}

Date to_date(const std::string& text) {
    auto d = Date::parse(text);
    if (!d) throw Error(ErrorCode::ConfigInvalid, "expected YYYY-MM-DD, got '" + text + "'");
    return *d;
}

Strategy to_strategy(const std::string& name) {
    auto s = parse_strategy(name);
    if (!s) throw Error(ErrorCode::ConfigInvalid, "unknown strategy '" + name + "'");
    return *s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Sharpe-screened portfolio construction, backtesting and alpha search";

    py::exception<Error>(m, "SharpefolioError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const Error& e) {
            py::object type = py::module_::import("sharpefolio._core").attr("SharpefolioError");
            py::object exc = type(e.what());
            exc.attr("code") = std::string(to_string(e.code()));
            exc.attr("exit_code") = static_cast<int>(e.error_class());
            PyErr_SetObject(type.ptr(), exc.ptr());
        }
    });

    py::class_<PricePanel>(m, "PricePanel")
        .def_readonly("assets", &PricePanel::assets)
        .def_property_readonly("dates", [](const PricePanel& p) { return date_strings(p.calendar); })
        .def_readonly("closes", &PricePanel::closes)
        .def_readonly("volumes", &PricePanel::volumes)
        .def_readonly("caps", &PricePanel::caps)
        .def("__len__", &PricePanel::length)
        .def("__repr__", [](const PricePanel& p) {
            return "<PricePanel " + std::to_string(p.asset_count()) + " assets x " + std::to_string(p.length()) +
                   " days>";
        });

    m.def(
        "load_panel",
        [](const std::filesystem::path& path, double max_missing_frac, double min_adv) {
            LoadOptions opts;
            opts.max_missing_frac = max_missing_frac;
            return clean_panel(load_panel(path, PanelFormat::csv, opts), max_missing_frac, min_adv);
        },
        py::arg("path"), py::arg("max_missing_frac") = 0.1, py::arg("min_adv") = 0.0,
        "Load and clean a `symbol,date,close,volume,market_cap` CSV.");
    m.def("write_panel", &write_panel, py::arg("panel"), py::arg("path"));
    m.def(
        "synthetic_panel",
        [](std::size_t assets, std::size_t days, std::uint64_t seed) {
            return clean_panel(make_synthetic_panel({assets, days, seed, assets >= 3}), 0.1, 0.0);
        },
        py::arg("assets") = 20, py::arg("days") = 700, py::arg("seed") = 3);

    m.def(
        "select_universe",
        [](const PricePanel& panel, const std::string& date, std::size_t top_n, std::size_t lookback, double tau1,
           double tau2, double min_adv) {
            SelectionConfig cfg;
            cfg.top_n = top_n;
            cfg.lookback = lookback;
            cfg.tau1 = tau1;
            cfg.tau2 = tau2;
            cfg.min_adv = min_adv;
            py::list out;
            for (const auto& mem : select_universe(panel, to_date(date), cfg).members) {
                py::dict row;
                row["rank"] = mem.rank;
                row["symbol"] = mem.label.symbol;
                row["label"] = std::string(to_string(mem.label.label));
                row["slope"] = mem.label.slope;
                row["vol"] = mem.label.vol;
                row["rolling_sharpe"] = mem.label.rolling_sharpe;
                out.append(row);
            }
            return out;
        },
        py::arg("panel"), py::arg("date"), py::arg("top_n") = 10, py::arg("lookback") = 60, py::arg("tau1") = 0.001,
        py::arg("tau2") = 0.02, py::arg("min_adv") = 0.0);

    m.def(
        "blend_weights",
        [](const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, double alpha) {
            std::vector<std::string> symbols;
            for (Eigen::Index i = 0; i < mu.size(); ++i) symbols.push_back(std::to_string(i));
            return blend_weights(AssetStats::from_moments(symbols, mu, cov), alpha).weights.weights;
        },
        py::arg("mu"), py::arg("cov"), py::arg("alpha") = 0.5);

    m.def(
        "solve_mean_variance",
        [](const Eigen::VectorXd& mu, const Eigen::MatrixXd& cov, const std::string& objective, double lam,
           std::optional<double> r_min) {
            auto obj = parse_objective(objective);
            if (!obj) throw Error(ErrorCode::ConfigInvalid, "unknown objective '" + objective + "'");
            std::vector<std::string> symbols;
            for (Eigen::Index i = 0; i < mu.size(); ++i) symbols.push_back(std::to_string(i));
            OptimizerConfig cfg;
            cfg.lambda = lam;
            cfg.r_min = r_min;
            return solve_mean_variance(AssetStats::from_moments(symbols, mu, cov), cfg, *obj).weights;
        },
        py::arg("mu"), py::arg("cov"), py::arg("objective") = "utility", py::arg("lam") = 10.0,
        py::arg("r_min") = py::none());

    m.def(
        "backtest",
        [](const PricePanel& panel, const std::string& strategy, double cost_bps, bool risk_control,
           std::size_t lookback, const std::string& universe) {
            BacktestConfig cfg;
            cfg.strategy = to_strategy(strategy);
            cfg.cost_bps_per_side = cost_bps;
            cfg.risk.enabled = risk_control;
            cfg.selection.lookback = lookback;
            auto mode = parse_universe_mode(universe);
            if (!mode) throw Error(ErrorCode::ConfigInvalid, "universe must be screened or liquid");
            cfg.universe = *mode;
            BacktestReport rep = run_backtest(panel, cfg);
            py::dict out;
            out["dates"] = date_strings(rep.dates);
            out["equity"] = rep.equity_curve;
            out["exposures"] = rep.exposures;
            out["costs"] = rep.costs_paid;
            out["metrics"] = metrics_dict(rep.metrics);
            return out;
        },
        py::arg("panel"), py::arg("strategy") = "sharpe_blend", py::arg("cost_bps") = 5.0,
        py::arg("risk_control") = true, py::arg("lookback") = 60, py::arg("universe") = "screened");

    m.def(
        "metrics",
        [](const std::vector<double>& equity) { return metrics_dict(compute_metrics(equity, {}, std::nullopt)); },
        py::arg("equity"));
    m.def("max_drawdown", [](const std::vector<double>& equity) { return max_drawdown(equity); }, py::arg("equity"));
    m.def(
        "sharpe", [](const std::vector<double>& r, double rf) { return sharpe(r, rf); }, py::arg("returns"),
        py::arg("risk_free") = 0.0);

    m.def(
        "normalize_alpha", [](const std::string& text) { return AlphaExpr::parse(text).to_string(); },
        py::arg("expression"), "Parse a prefix expression and print it back in canonical form.");
    m.def(
        "score_alpha",
        [](const std::string& text, const PricePanel& panel, double cost_bps) {
            GpConfig cfg;
            cfg.cost_bps_per_side = cost_bps;
            AlphaScore s = score_alpha(AlphaExpr::parse(text), panel, cfg);
            return py::dict(py::arg("sharpe") = s.sharpe, py::arg("turnover") = s.turnover, py::arg("mdd") = s.mdd,
                            py::arg("fitness") = s.fitness);
        },
        py::arg("expression"), py::arg("panel"), py::arg("cost_bps") = 5.0);
    m.def(
        "evolve",
        [](const PricePanel& panel, std::size_t population, std::size_t generations, std::uint64_t seed,
           const std::vector<std::string>& seeds) {
            GpConfig cfg;
            cfg.population = population;
            cfg.generations = generations;
            cfg.seed = seed;
            for (const auto& s : seeds) cfg.seeds.push_back(AlphaExpr::parse(s));
            EvolveResult res = evolve(panel, cfg);
            py::list out;
            for (const auto& a : res.population)
                out.append(py::make_tuple(a.expr.to_string(), a.failed ? py::object(py::none())
                                                                        : py::object(py::float_(a.score.fitness))));
            return out;
        },
        py::arg("panel"), py::arg("population") = 50, py::arg("generations") = 10, py::arg("seed") = 42,
        py::arg("seeds") = std::vector<std::string>{});
}
