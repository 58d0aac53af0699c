// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numeric>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "oracles.hpp"
#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/backtest.hpp"
#include "sharpefolio/commands.hpp"
#include "sharpefolio/config.hpp"
#include "sharpefolio/error.hpp"
#include "sharpefolio/metrics.hpp"
#include "sharpefolio/risk.hpp"
#include "sharpefolio/synthetic.hpp"
#include "sharpefolio/universe.hpp"
#include "support.hpp"

using namespace sharpefolio;
using sharpefolio::detail::Rng;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = SHARPEFOLIO_SOURCE_DIR;

/// Collects failed checks for one criterion.
struct Check {
    std::vector<std::string> failures;
    void expect(bool ok, const std::string& what) {
        if (!ok && failures.size() < 5) failures.push_back(what);
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string("\"") + SHARPEFOLIO_CLI + "\" " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string quoted(const fs::path& p) { return "\"" + p.string() + "\""; }

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "sharpefolio-acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("X" + std::to_string(i));
    return out;
}

AssetStats random_stats(Rng& rng, std::size_t n) {
    const auto k = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd a(k, k);
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j) a(i, j) = 0.1 * rng.normal();
    Eigen::MatrixXd cov = a * a.transpose() / static_cast<double>(n) + 0.001 * Eigen::MatrixXd::Identity(k, k);
    Eigen::VectorXd mu(k);
    for (Eigen::Index i = 0; i < k; ++i) mu(i) = 0.02 * rng.normal();
    return AssetStats::from_moments(names(n), mu, cov);
}

double quad(const AssetStats& s, const std::vector<double>& w) {
    double v = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            v += w[i] * w[j] * s.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return v;
}

double lin(const AssetStats& s, const std::vector<double>& w) {
    double r = 0;
    for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * s.mu(static_cast<Eigen::Index>(i));
    return r;
}

double grid_best(std::size_t n, const std::function<double(const std::vector<double>&)>& f) {
    if (n == 1) return f({1.0});
    double best = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= 1000; ++i) {
        if (n == 2) {
            best = std::max(best, f({i / 1000.0, (1000 - i) / 1000.0}));
            continue;
        }
        for (int j = 0; i + j <= 1000; ++j) best = std::max(best, f({i / 1000.0, j / 1000.0, (1000 - i - j) / 1000.0}));
    }
    return best;
}

PricePanel random_panel(Rng& rng, std::size_t assets, std::size_t days) {
    std::vector<std::string> syms;
    std::vector<std::vector<double>> closes, volumes, caps;
    for (std::size_t a = 0; a < assets; ++a) {
        syms.push_back("P" + std::to_string(a));
        closes.push_back(testing::random_walk(rng, days, 0.0015 * (rng.unit() - 0.3), 0.005 + 0.02 * rng.unit()));
        std::vector<double> v, c;
        for (std::size_t t = 0; t < days; ++t) {
            v.push_back(1e5 * (1 + rng.unit()) * static_cast<double>(a + 1));
            c.push_back(closes.back()[t] * 1e6 * static_cast<double>(assets - a));
        }
        volumes.push_back(v);
        caps.push_back(c);
    }
    return testing::panel_of(syms, closes, volumes, caps);
}

BacktestConfig raw_cfg(double cost_bps) {
    BacktestConfig cfg;
    cfg.cost_bps_per_side = cost_bps;
    cfg.risk.enabled = false;
    cfg.selection.lookback = 2;
    return cfg;
}

WeightPolicy hold_one(const std::string& symbol) {
    return [symbol](std::size_t) { return WeightVector{{}, {symbol}, {1.0}}; };
}

// 1 ------------------------------------------------------------------------------------------
void metrics_oracles(Check& c, std::ostringstream& info) {
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(1001);
    for (int i = 0; i < 1000; ++i) {
        std::vector<double> v{100.0};
        const std::size_t n = 2 + rng.index(200);
        for (std::size_t t = 0; t < n; ++t) v.push_back(v.back() * (1 + 0.02 * rng.normal()));
        c.expect(max_drawdown(v) == oracle::brute_mdd(v), "streaming mdd differs from brute force");
    }
    double worst = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> r;
        for (int k = 0; k < 250; ++k) r.push_back(0.0003 + 0.015 * rng.normal());
        const double rf = 0.0001 * rng.unit();
        auto [var, cvar] = oracle::var_cvar(r, 0.05);
        const auto tr = var_cvar(r, 0.05);
        const double diffs[] = {sharpe(r, rf) - oracle::sharpe(r, rf, 252),
                                sortino(r, rf) - oracle::sortino(r, rf, 252),
                                skewness(r) - oracle::skew(r),
                                excess_kurtosis(r) - oracle::excess_kurtosis(r),
                                tr.var - var,
                                tr.cvar - cvar};
        for (double d : diffs) worst = std::max(worst, std::abs(d));
    }
    c.expect(worst <= 1e-10, "formula oracle gap " + std::to_string(worst));
    const double secs = seconds_since(t0);
    c.expect(secs < 5.0, "took " + std::to_string(secs) + " s");
    info << "max oracle gap " << worst << ", " << secs << " s";
}

// 2 ------------------------------------------------------------------------------------------
void risk_state_machine(Check& c, std::ostringstream& info) {
    const auto cfg = RiskConfig::standard();
    const double dds[] = {0.019999, 0.02, 0.039999, 0.04, 0.059999, 0.06};
    const double expect[] = {1.0, 0.8, 0.8, 0.6, 0.6, 0.0};
    for (int i = 0; i < 6; ++i) {
        c.expect(tier_exposure(dds[i], cfg) == expect[i], "tier at " + std::to_string(dds[i]));
        RiskState s;
        s.peak = 1.0;
        c.expect(update(s, 1.0 - dds[i], cfg).exposure == expect[i], "update at " + std::to_string(dds[i]));
    }
    for (std::size_t days : {1u, 2u, 3u, 7u}) {
        RiskConfig rc = cfg;
        rc.cooldown_days = days;
        RiskState s;
        s = update(s, 100, rc);
        s = update(s, 90, rc);
        c.expect(s.exposure == 0.0, "hard stop");
        std::size_t pinned = 0;
        for (int k = 0; k < 20; ++k) {
            s = update(s, 150, rc);
            if (s.exposure != 0.0) break;
            ++pinned;
        }
        c.expect(pinned == days, "cooldown of " + std::to_string(days) + " pinned " + std::to_string(pinned));
    }
    Rng rng(2002);
    std::vector<double> eq{100};
    for (int i = 0; i < 2000; ++i) eq.push_back(eq.back() * (1 + 0.02 * rng.normal()));
    auto replay = [&] {
        std::vector<RiskState> out;
        RiskState s;
        for (double v : eq) out.push_back(s = update(s, v, cfg));
        return out;
    };
    c.expect(replay() == replay(), "replay differs");
    info << "boundary sweep, cooldown 1/2/3/7, 2000-bar replay";
}

// 3 ------------------------------------------------------------------------------------------
void optimizer_correctness(Check& c, std::ostringstream& info) {
    Rng rng(3003);
    double worst_cf = 0;
    for (int i = 0; i < 50; ++i) {
        const double s1 = 0.05 + 0.3 * rng.unit(), s2 = 0.05 + 0.3 * rng.unit();
        Eigen::VectorXd mu(2);
        mu << 0.01 * rng.normal(), 0.01 * rng.normal();
        Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
        cov(0, 0) = s1 * s1;
        cov(1, 1) = s2 * s2;
        auto w = solve_mean_variance(AssetStats::from_moments({"A", "B"}, mu, cov), {}, Objective::min_risk);
        worst_cf = std::max(worst_cf, std::abs(w.weight_of("A") - s2 * s2 / (s1 * s1 + s2 * s2)));
    }
    c.expect(worst_cf <= 1e-8, "closed form gap " + std::to_string(worst_cf));

    double worst_grid = -1;
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        auto s = random_stats(rng, n);
        OptimizerConfig cfg;
        cfg.lambda = 0.5 + 20 * rng.unit();
        std::vector<std::pair<Objective, std::function<double(const std::vector<double>&)>>> objs = {
            {Objective::utility, [&](const auto& w) { return lin(s, w) - cfg.lambda * quad(s, w); }},
            {Objective::min_risk, [&](const auto& w) { return -quad(s, w); }},
            {Objective::max_return, [&](const auto& w) { return lin(s, w); }}};
        if (s.mu.maxCoeff() > 0)
            objs.push_back({Objective::max_sharpe, [&](const auto& w) { return lin(s, w) / std::sqrt(quad(s, w)); }});
        for (auto& [obj, f] : objs) {
            auto w = solve_mean_variance(s, cfg, obj).weights;
            const double gap = grid_best(n, f) - f(w);
            worst_grid = std::max(worst_grid, gap);
            c.expect(gap <= 1e-3, std::string(to_string(obj)) + " trails the grid by " + std::to_string(gap));
        }
    }

    auto cfg = load_config(kSource / "configs" / "default.ini");
    auto panel = load_configured_panel(cfg);
    auto rets = to_returns(panel);
    auto u = select_universe_at(panel, panel.length() - 1, cfg.backtest.selection);
    auto stats = estimate_stats(rets, u.symbols(), rets.length() - 1, cfg.backtest.effective_stats_window(), 0.0);
    auto pts = efficient_frontier(stats, log_spaced(0.1, 1000, 20), cfg.backtest.optimizer);
    bool monotone = pts.size() == 20;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        monotone = monotone && pts[i].weights && pts[i - 1].weights;
        monotone = monotone && pts[i].variance <= pts[i - 1].variance + 1e-12;
        monotone = monotone && pts[i].expected_return <= pts[i - 1].expected_return + 1e-12;
    }
    c.expect(monotone, "frontier is not monotone in lambda");

    std::size_t checked = 0;
    for (auto s : kAllStrategies) {
        BacktestConfig bc = cfg.backtest;
        bc.strategy = s;
        bc.optimizer.turnover_cap = 0.4;
        bc.optimizer.default_bounds = {0.0, 0.5};
        auto rep = run_backtest(panel, bc);
        const WeightVector* prev = nullptr;
        for (const auto& w : rep.weights_history) {
            if (w.empty()) {
                prev = nullptr;
                continue;
            }
            ++checked;
            c.expect(std::abs(w.sum() - 1.0) <= 1e-9, "weights do not sum to one");
            for (double x : w.weights) c.expect(x >= 0.0 && x <= 0.5 + 1e-12, "weight outside bounds");
            if (prev) c.expect(turnover(*prev, w) <= 0.4 + 1e-9, "turnover cap exceeded");
            prev = &w;
        }
    }
    for (const auto& p : pts)
        if (p.weights) {
            ++checked;
            c.expect(std::abs(p.weights->sum() - 1.0) <= 1e-9, "frontier weights do not sum to one");
        }
    info << "closed form gap " << worst_cf << ", worst grid gap " << worst_grid << ", " << checked
         << " weight vectors checked";
}

// 4 ------------------------------------------------------------------------------------------
void blend(Check& c, std::ostringstream& info) {
    Eigen::VectorXd mu(2);
    mu << 0.1, 0.6;
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(2, 2);
    cov(0, 0) = 0.01;
    cov(1, 1) = 0.04;
    auto w = blend_weights(AssetStats::from_moments({"A", "B"}, mu, cov), 0.5).weights;
    c.expect(std::abs(w.weight_of("A") - 11.0 / 24.0) <= 1e-9 && std::abs(w.weight_of("B") - 13.0 / 24.0) <= 1e-9,
             "worked example");
    info << "worked example [" << w.weight_of("A") << ", " << w.weight_of("B") << "]";

    Rng rng(4004);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 + rng.index(6);
        auto s = random_stats(rng, n);
        const double alpha = rng.unit();
        auto base = blend_weights(s, alpha).weights;

        std::vector<std::size_t> perm(n);
        std::iota(perm.begin(), perm.end(), 0);
        for (std::size_t k = n - 1; k > 0; --k) std::swap(perm[k], perm[rng.index(k + 1)]);
        Eigen::VectorXd pm(static_cast<Eigen::Index>(n));
        Eigen::MatrixXd pc(pm.size(), pm.size());
        std::vector<std::string> ps;
        for (std::size_t a = 0; a < n; ++a) {
            pm(static_cast<Eigen::Index>(a)) = s.mu(static_cast<Eigen::Index>(perm[a]));
            ps.push_back(s.symbols[perm[a]]);
            for (std::size_t b = 0; b < n; ++b)
                pc(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
                    s.cov(static_cast<Eigen::Index>(perm[a]), static_cast<Eigen::Index>(perm[b]));
        }
        auto permuted = blend_weights(AssetStats::from_moments(ps, pm, pc), alpha).weights;

        const double k = 0.01 + 100 * rng.unit();
        auto scaled = blend_weights(AssetStats::from_moments(s.symbols, s.mu * k, s.cov * (k * k)), alpha).weights;
        for (const auto& sym : s.symbols) {
            c.expect(std::abs(base.weight_of(sym) - permuted.weight_of(sym)) <= 1e-12, "symmetry");
            c.expect(std::abs(base.weight_of(sym) - scaled.weight_of(sym)) <= 1e-12, "scale invariance");
        }
    }
}

// 5 ------------------------------------------------------------------------------------------
void accounting(Check& c, std::ostringstream& info) {
    Rng rng(5005);
    double worst = 0;
    std::size_t bars = 0;
    for (int run = 0; run < 100; ++run) {
        auto panel = random_panel(rng, 6, 120);
        BacktestConfig cfg;
        cfg.selection.lookback = 20;
        cfg.selection.top_n = 6;
        cfg.selection.tau1 = 0.0002;
        cfg.universe = run % 2 ? UniverseMode::liquid : UniverseMode::screened;
        cfg.strategy = kAllStrategies[static_cast<std::size_t>(run) % 4];
        if (run % 3 == 0) cfg.optimizer.turnover_cap = 0.3;
        auto rep = run_backtest(panel, cfg);
        for (std::size_t t = 0; t < rep.periods(); ++t, ++bars) {
            const double rhs =
                rep.equity_curve[t] * (1 + rep.exposures[t] * rep.portfolio_returns[t]) - rep.costs_paid[t];
            worst = std::max(worst, std::abs(rep.equity_curve[t + 1] - rhs) / std::abs(rhs));
        }
    }
    c.expect(worst <= 1e-9, "identity gap " + std::to_string(worst));

    auto closes = testing::random_walk(rng, 80, 0.001, 0.02);
    auto single = testing::panel_of({"A"}, {closes});
    auto rep = run_backtest_with(single, raw_cfg(0.0), hold_one("A"), 2);
    const double expect = 1e6 * closes.back() / closes[2];
    const double compound_gap = std::abs(rep.equity_curve.back() - expect) / expect;
    c.expect(compound_gap <= 1e-12, "single asset compounding gap " + std::to_string(compound_gap));

    auto flat = testing::panel_of({"A"}, {std::vector<double>(6, 10.0)});
    WeightPolicy in_then_out = [](std::size_t t) {
        return t == 2 ? WeightVector{{}, {"A"}, {1.0}} : WeightVector{};
    };
    BacktestConfig rc = raw_cfg(5.0);
    rc.end = flat.calendar[4];
    auto rt = run_backtest_with(flat, rc, in_then_out, 2);
    const double target = 1e6 * (1 - 0.0005) * (1 - 0.0005);
    c.expect(std::abs(rt.equity_curve.back() - target) <= 1e-12 * 1e6,
             "round trip " + std::to_string(rt.equity_curve.back()));
    info << bars << " bars, worst relative gap " << worst << ", round trip " << rt.equity_curve.back();
}

// 6 ------------------------------------------------------------------------------------------
void directional(Check& c, std::ostringstream& info) {
    auto cfg = load_config(kSource / "configs" / "default.ini");
    auto panel = load_configured_panel(cfg);
    auto suite = run_strategy_suite(panel, cfg);
    std::optional<double> blend_sharpe, ew_sharpe;
    for (auto& [name, rep] : suite) {
        if (name == "sharpe_blend") blend_sharpe = rep.metrics.sharpe;
        if (name == "equal_weight") ew_sharpe = rep.metrics.sharpe;
    }
    c.expect(blend_sharpe && ew_sharpe && *blend_sharpe > *ew_sharpe, "sharpe_blend does not beat equal weight");

    BacktestConfig off = cfg.backtest;
    off.risk.enabled = false;
    const double mdd_on = run_backtest(panel, cfg.backtest).metrics.mdd.value_or(1.0);
    const double mdd_off = run_backtest(panel, off).metrics.mdd.value_or(0.0);
    c.expect(mdd_on <= mdd_off, "controller raised drawdown");
    info << "sharpe " << blend_sharpe.value_or(NAN) << " vs equal weight " << ew_sharpe.value_or(NAN) << ", mdd "
         << mdd_on << " controlled vs " << mdd_off << " uncontrolled";
}

// 7 ------------------------------------------------------------------------------------------
void universe(Check& c, std::ostringstream& info) {
    auto cfg = load_config(kSource / "configs" / "default.ini");
    auto panel = load_configured_panel(cfg);
    auto snap = select_universe_at(panel, panel.length() - 1, cfg.backtest.selection);
    const std::string top = snap.members.empty() ? "" : snap.members.front().label.symbol;
    c.expect(top == kPlantedSymbol, "rank 1 is " + top);

    const std::size_t lb = cfg.backtest.selection.lookback;
    std::vector<std::vector<double>> windows;
    for (std::size_t a = 0; a < panel.asset_count(); ++a) {
        std::vector<double> w(panel.closes[a].end() - static_cast<long>(lb), panel.closes[a].end());
        if (std::none_of(w.begin(), w.end(), is_missing)) windows.push_back(w);
    }
    std::size_t prev = windows.size() + 1;
    bool shrinking = true;
    std::vector<std::size_t> sizes;
    for (double tau1 = -0.002; tau1 <= 0.004 + 1e-12; tau1 += 0.0005) {
        SelectionConfig sc = cfg.backtest.selection;
        sc.tau1 = tau1;
        std::size_t ups = 0;
        for (const auto& w : windows) ups += label_asset(w, sc).label == Trend::up;
        shrinking = shrinking && ups <= prev;
        prev = ups;
        sizes.push_back(ups);
    }
    c.expect(shrinking, "up set grew with tau1");

    Rng rng(7007);
    for (int i = 0; i < 50; ++i) {
        const double k = std::exp(6 * (rng.unit() - 0.5));
        for (const auto& w : windows) {
            std::vector<double> s;
            for (double x : w) s.push_back(x * k);
            c.expect(label_asset(w, cfg.backtest.selection).label == label_asset(s, cfg.backtest.selection).label,
                     "label changed under rescaling");
        }
    }
    info << "rank 1 " << top << ", up-set sizes";
    for (auto s : sizes) info << ' ' << s;
}

// 8 ------------------------------------------------------------------------------------------
void gp(Check& c, std::ostringstream& info) {
    const auto a = scratch("evolve-a"), b = scratch("evolve-b");
    const auto cfg_path = kSource / "configs" / "default.ini";
    c.expect(run_cli("evolve " + quoted(cfg_path) + " --output-dir " + quoted(a)) == 0, "first evolve failed");
    c.expect(run_cli("evolve " + quoted(cfg_path) + " --output-dir " + quoted(b)) == 0, "second evolve failed");
    const auto x = testing::read_text(a / "alphas.csv"), y = testing::read_text(b / "alphas.csv");
    c.expect(!x.empty() && x == y, "alphas.csv differs between runs");

    auto cfg = load_config(cfg_path);
    auto panel = load_configured_panel(cfg);
    auto res = evolve(panel, cfg.gp);
    for (std::size_t i = 1; i < res.best_fitness.size(); ++i)
        c.expect(res.best_fitness[i] >= res.best_fitness[i - 1], "best fitness dropped");

    auto rigged_cfg = load_config(kSource / "configs" / "evolve_rigged.ini");
    auto rigged = load_configured_panel(rigged_cfg);
    auto rr = evolve(rigged, rigged_cfg.gp);
    const std::string champ = rr.population.front().expr.to_string();
    c.expect(!rigged_cfg.gp.seeds.empty() && champ == rigged_cfg.gp.seeds.front().to_string(),
             "rank 1 is " + champ);
    info << "fixture best " << res.best_fitness.front() << " -> " << res.best_fitness.back() << ", rigged champion "
         << champ << " fitness " << rr.population.front().score.fitness;
}

// 9 ------------------------------------------------------------------------------------------
void performance(Check& c, std::ostringstream& info) {
    const auto dir = scratch("perf");
    SyntheticSpec spec;
    spec.assets = 500;
    spec.days = 650;
    spec.seed = 9;
    write_panel(make_synthetic_panel(spec), dir / "panel.csv");
    testing::write_text(dir / "perf.ini", "output_dir = " + (dir / "out").string() + "\n[data]\npath = panel.csv\n[selection]\nmin_adv = 10000\n");

    auto t0 = std::chrono::steady_clock::now();
    const int bt = run_cli("backtest " + quoted(dir / "perf.ini"));
    const double bt_secs = seconds_since(t0);
    c.expect(bt == 0, "backtest exited " + std::to_string(bt));
    c.expect(fs::exists(dir / "out" / "comparison.csv"), "no comparison.csv");
    c.expect(bt_secs < 10.0, "backtest took " + std::to_string(bt_secs) + " s");

    t0 = std::chrono::steady_clock::now();
    const int ev = run_cli("evolve " + quoted(kSource / "configs" / "default.ini") + " --output-dir " +
                           quoted(dir / "evolve"));
    const double ev_secs = seconds_since(t0);
    c.expect(ev == 0, "evolve exited " + std::to_string(ev));
    c.expect(ev_secs < 60.0, "evolve took " + std::to_string(ev_secs) + " s");
    info << "500x650 backtest " << bt_secs << " s, evolve 50x10 " << ev_secs << " s";
}

// 10 -----------------------------------------------------------------------------------------
void cli_contract(Check& c, std::ostringstream& info) {
    const auto dir = scratch("cli");
    const auto fx = kSource / "tests" / "fixtures";
    const std::string to = " --output-dir " + quoted(dir);
    const int e1 = run_cli("backtest " + quoted(fx / "negative_cost.ini") + to);
    const int e2 = run_cli("backtest " + quoted(fx / "missing_data.ini") + to);
    const int e3 = run_cli("frontier " + quoted(fx / "unreachable_return.ini") + to);
    c.expect(e1 == 1, "config fixture exited " + std::to_string(e1));
    c.expect(e2 == 2, "data fixture exited " + std::to_string(e2));
    c.expect(e3 == 3, "runtime fixture exited " + std::to_string(e3));

    c.expect(run_cli("backtest " + quoted(kSource / "configs" / "default.ini") + to) == 0, "backtest failed");
    std::istringstream csv(testing::read_text(dir / "comparison.csv"));
    std::string header, line;
    std::getline(csv, header);
    std::string want = "strategy";
    for (auto f : kMetricsFields) want += "," + std::string(f);
    c.expect(header == want, "header " + header);
    std::vector<std::string> rows;
    while (std::getline(csv, line))
        if (!line.empty()) rows.push_back(line.substr(0, line.find(',')));
    std::vector<std::string> expected;
    for (auto s : kAllStrategies) expected.emplace_back(to_string(s));
    auto sorted_rows = rows;
    std::sort(sorted_rows.begin(), sorted_rows.end());
    std::sort(expected.begin(), expected.end());
    c.expect(sorted_rows == expected, "rows do not cover each strategy once");
    info << "exit codes " << e1 << "/" << e2 << "/" << e3 << ", " << rows.size() << " comparison rows";
}

} // namespace

int main() {
    const std::pair<const char*, void (*)(Check&, std::ostringstream&)> criteria[] = {
        {"metrics oracle suite", metrics_oracles},
        {"risk controller state machine", risk_state_machine},
        {"optimizer correctness", optimizer_correctness},
        {"blend weights", blend},
        {"backtest accounting identity", accounting},
        {"directional check on the fixture", directional},
        {"universe selection", universe},
        {"gp determinism and elitism", gp},
        {"end-to-end performance", performance},
        {"cli contract", cli_contract},
    };
    int failed = 0, n = 0;
    for (const auto& [name, fn] : criteria) {
        ++n;
        Check c;
        std::ostringstream info;
        try {
            fn(c, info);
        } catch (const std::exception& e) {
            c.failures.push_back(std::string("exception: ") + e.what());
        }
        const bool ok = c.failures.empty();
        failed += !ok;
        std::cout << "criterion " << n << ": " << (ok ? "PASS" : "FAIL") << "  " << name << " (" << info.str() << ")\n";
        for (const auto& f : c.failures) std::cout << "    " << f << "\n";
    }
    std::cout << (n - failed) << "/" << n << " criteria passed\n";
    return failed == 0 ? 0 : 1;
}
