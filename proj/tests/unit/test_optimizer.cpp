#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "sharpefolio/error.hpp"
#include "sharpefolio/optimizer.hpp"
#include "support.hpp"

using namespace sharpefolio;
using sharpefolio::detail::Rng;

namespace {

std::vector<std::string> names(std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < n; ++i) out.push_back("X" + std::to_string(i));
    return out;
}

AssetStats stats_of(std::vector<double> mu, std::vector<std::vector<double>> cov, double rf = 0.0) {
    const auto n = static_cast<Eigen::Index>(mu.size());
    Eigen::VectorXd m(n);
    Eigen::MatrixXd c(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        m(i) = mu[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) c(i, j) = cov[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    return AssetStats::from_moments(names(mu.size()), m, c, rf);
}

AssetStats random_stats(Rng& rng, std::size_t n) {
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) a(i, j) = 0.1 * rng.normal();
    Eigen::MatrixXd cov = a * a.transpose() / static_cast<double>(n) +
                          0.001 * Eigen::MatrixXd::Identity(a.rows(), a.cols());
    Eigen::VectorXd mu(a.rows());
    for (Eigen::Index i = 0; i < mu.size(); ++i) mu(i) = 0.02 * rng.normal();
    return AssetStats::from_moments(names(n), mu, cov);
}

double var_of(const AssetStats& s, const std::vector<double>& w) {
    double v = 0;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = 0; j < w.size(); ++j)
            v += w[i] * w[j] * s.cov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    return v;
}

double ret_of(const AssetStats& s, const std::vector<double>& w) {
    double r = 0;
    for (std::size_t i = 0; i < w.size(); ++i) r += w[i] * s.mu(static_cast<Eigen::Index>(i));
    return r;
}

// Best objective value over the 0.001-step simplex grid (n <= 3).
double grid_best(std::size_t n, const std::function<double(const std::vector<double>&)>& f) {
    double best = -std::numeric_limits<double>::infinity();
    const int steps = 1000;
    if (n == 1) return f({1.0});
    for (int i = 0; i <= steps; ++i) {
        if (n == 2) {
            best = std::max(best, f({i / 1000.0, (steps - i) / 1000.0}));
            continue;
        }
        for (int j = 0; i + j <= steps; ++j)
            best = std::max(best, f({i / 1000.0, j / 1000.0, (steps - i - j) / 1000.0}));
    }
    return best;
}

void check_valid(const WeightVector& w, const OptimizerConfig& cfg = {}) {
    CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
    for (std::size_t i = 0; i < w.weights.size(); ++i) {
        Bounds b = cfg.bounds_for(w.symbols[i]);
        CHECK(w.weights[i] >= b.lower - 1e-12);
        CHECK(w.weights[i] <= b.upper + 1e-12);
    }
}

} // namespace

TEST_CASE("estimate_stats") {
    SUBCASE("two-point series") {
        ReturnPanel r{{"A"}, {}, {{0.01, 0.03}}};
        r.dates.resize(2);
        auto s = estimate_stats(r, 2, 0.0);
        CHECK(s.mu(0) == doctest::Approx(0.02).epsilon(1e-14));
        CHECK(s.sigma(0) == doctest::Approx(std::sqrt(0.0002)).epsilon(1e-12));
    }
    SUBCASE("duplicate series are perfectly correlated") {
        Rng rng(1);
        std::vector<double> x;
        for (int i = 0; i < 50; ++i) x.push_back(0.01 * rng.normal());
        ReturnPanel r{{"A", "B"}, std::vector<Date>(50), {x, x}};
        auto s = estimate_stats(r, 50, 0.0);
        CHECK(s.mu(0) == s.mu(1));
        CHECK(s.sigma(0) == s.sigma(1));
        CHECK(s.cov(0, 1) / (s.sigma(0) * s.sigma(1)) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("independent coin flips are nearly uncorrelated") {
        Rng rng(2);
        const std::size_t n = 20000;
        std::vector<double> x, y;
        for (std::size_t i = 0; i < n; ++i) {
            x.push_back(rng.chance(0.5) ? 0.01 : -0.01);
            y.push_back(rng.chance(0.5) ? 0.01 : -0.01);
        }
        ReturnPanel r{{"A", "B"}, std::vector<Date>(n), {x, y}};
        auto s = estimate_stats(r, n, 0.0);
        CHECK(std::abs(s.cov(0, 1) / (s.sigma(0) * s.sigma(1))) <= 3.0 / std::sqrt(static_cast<double>(n)));
    }
    SUBCASE("covariance is symmetric with sigma squared on the diagonal") {
        Rng rng(3);
        ReturnPanel r{{"A", "B", "C"}, std::vector<Date>(60), {}};
        for (int a = 0; a < 3; ++a) {
            std::vector<double> x;
            for (int i = 0; i < 60; ++i) x.push_back(0.01 * rng.normal());
            r.returns.push_back(x);
        }
        auto s = estimate_stats(r, 30, 0.0);
        for (int i = 0; i < 3; ++i) {
            CHECK(std::abs(s.cov(i, i) - s.sigma(i) * s.sigma(i)) <= 1e-9);
            for (int j = 0; j < 3; ++j) CHECK(std::abs(s.cov(i, j) - s.cov(j, i)) <= 1e-12);
        }
    }
    SUBCASE("constant series is flagged") {
        ReturnPanel r{{"A", "B"}, std::vector<Date>(4), {{0.01, 0.01, 0.01, 0.01}, {0.01, -0.02, 0.03, 0.0}}};
        auto s = estimate_stats(r, 4, 0.0);
        CHECK(s.zero_variance[0]);
        CHECK(!s.zero_variance[1]);
    }
    SUBCASE("window longer than history") {
        ReturnPanel r{{"A"}, std::vector<Date>(3), {{0.01, 0.02, 0.03}}};
        CHECK_THROWS_AS(estimate_stats(r, 5, 0.0), Error);
    }
}

TEST_CASE("blend_weights") {
    SUBCASE("worked example") {
        // sigma = [0.1, 0.2]; mu chosen so that S = [1, 3].
        auto s = stats_of({0.1, 0.6}, {{0.01, 0.0}, {0.0, 0.04}});
        auto w = blend_weights(s).weights.weights;
        const double w_iv0 = (1 / 0.1) / (1 / 0.1 + 1 / 0.2), w_s0 = 1.0 / 4.0;
        CHECK(std::abs(w[0] - (0.5 * w_iv0 + 0.5 * w_s0)) <= 1e-9);
        CHECK(std::abs(w[0] - 0.4583333333333333) <= 1e-9);
        CHECK(std::abs(w[1] - 0.5416666666666667) <= 1e-9);
    }
    SUBCASE("single asset") { CHECK(blend_weights(stats_of({0.01}, {{0.04}})).weights.weights == std::vector<double>{1.0}); }
    SUBCASE("identical assets") {
        auto w = blend_weights(stats_of({0.01, 0.01}, {{0.04, 0.0}, {0.0, 0.04}})).weights.weights;
        CHECK(w[0] == doctest::Approx(0.5));
        CHECK(w[1] == doctest::Approx(0.5));
    }
    SUBCASE("negative Sharpe everywhere falls back to equal weight in the Sharpe leg") {
        auto r = blend_weights(stats_of({-0.01, -0.02}, {{0.01, 0.0}, {0.0, 0.04}}));
        CHECK(r.sharpe_leg_equal_weight);
        CHECK(r.weights.weights[0] == doctest::Approx(0.5 * 2.0 / 3.0 + 0.25));
    }
    SUBCASE("zero-variance asset is excluded") {
        auto r = blend_weights(stats_of({0.01, 0.02}, {{0.0, 0.0}, {0.0, 0.04}}));
        CHECK(r.excluded == std::vector<std::string>{"X0"});
        CHECK(r.weights.weights == std::vector<double>{0.0, 1.0});
        CHECK_THROWS_AS(blend_weights(stats_of({0.01}, {{0.0}})), Error);
    }
    SUBCASE("no assets") { CHECK_THROWS_AS(blend_weights(AssetStats{}), Error); }
}

TEST_CASE("blend symmetry and scale properties") {
    Rng rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.index(6);
        std::vector<double> sigma, sharpe;
        for (std::size_t i = 0; i < n; ++i) {
            sigma.push_back(0.005 + 0.05 * rng.unit());
            sharpe.push_back(2.0 * rng.normal());
        }
        auto build = [&](const std::vector<std::size_t>& order, double sk, double shk) {
            std::vector<double> mu;
            std::vector<std::vector<double>> cov(n, std::vector<double>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i) {
                double s = sigma[order[i]] * sk;
                cov[i][i] = s * s;
                mu.push_back(sharpe[order[i]] * shk * s);
            }
            return blend_weights(stats_of(mu, cov)).weights.weights;
        };
        std::vector<std::size_t> id(n), perm(n);
        for (std::size_t i = 0; i < n; ++i) id[i] = perm[i] = i;
        for (std::size_t i = n - 1; i > 0; --i) std::swap(perm[i], perm[rng.index(i + 1)]);
        auto base = build(id, 1.0, 1.0);
        auto permuted = build(perm, 1.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(permuted[i] - base[perm[i]]) <= 1e-12);
        const double k = 0.1 + 10.0 * rng.unit();
        auto sig_scaled = build(id, k, 1.0);   // wIV unchanged, S unchanged
        auto shp_scaled = build(id, 1.0, k);   // wS unchanged
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(std::abs(sig_scaled[i] - base[i]) <= 1e-12);
            CHECK(std::abs(shp_scaled[i] - base[i]) <= 1e-12);
        }
    }
}

TEST_CASE("solve_mean_variance examples") {
    SUBCASE("two uncorrelated assets, minimum variance") {
        auto s = stats_of({0.05, 0.03}, {{0.04, 0.0}, {0.0, 0.01}});
        auto w = solve_mean_variance(s, {}, Objective::min_risk);
        CHECK(std::abs(w.weights[0] - 0.2) <= 1e-8);
        CHECK(std::abs(w.weights[1] - 0.8) <= 1e-8);
    }
    SUBCASE("max return picks the corner") {
        auto s = stats_of({0.1, 0.2}, {{0.04, 0.0}, {0.0, 0.09}});
        auto w = solve_mean_variance(s, {}, Objective::max_return);
        CHECK(w.weights == std::vector<double>{0.0, 1.0});
    }
    SUBCASE("utility approaches minimum variance as lambda grows") {
        Rng rng(4);
        auto s = random_stats(rng, 4);
        OptimizerConfig cfg;
        cfg.lambda = 1e6;
        auto u = solve_mean_variance(s, cfg, Objective::utility);
        auto m = solve_mean_variance(s, {}, Objective::min_risk);
        for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(u.weights[i] - m.weights[i]) <= 1e-4);
    }
    SUBCASE("bounds are respected") {
        auto s = stats_of({0.1, 0.2, 0.05}, {{0.04, 0.0, 0.0}, {0.0, 0.09, 0.0}, {0.0, 0.0, 0.01}});
        OptimizerConfig cfg;
        cfg.default_bounds = {0.1, 0.5};
        for (auto obj : {Objective::max_return, Objective::min_risk, Objective::max_sharpe, Objective::utility}) {
            auto w = solve_mean_variance(s, cfg, obj);
            check_valid(w, cfg);
        }
        auto w = solve_mean_variance(s, cfg, Objective::max_return);
        CHECK(w.weights[1] == doctest::Approx(0.5));
        CHECK(w.weights[0] == doctest::Approx(0.4));
    }
    SUBCASE("r_min binds the minimum-variance portfolio") {
        auto s = stats_of({0.05, 0.03}, {{0.04, 0.0}, {0.0, 0.01}});
        OptimizerConfig cfg;
        cfg.r_min = 0.04;
        auto w = solve_mean_variance(s, cfg, Objective::min_risk);
        CHECK(ret_of(s, w.weights) >= 0.04 - 1e-9);
        CHECK(std::abs(w.weights[0] - 0.5) <= 1e-6);
    }
    SUBCASE("infeasible constraints are distinguished") {
        auto s = stats_of({0.05, 0.03}, {{0.04, 0.0}, {0.0, 0.01}});
        OptimizerConfig too_high;
        too_high.r_min = 0.06;
        try {
            solve_mean_variance(s, too_high, Objective::min_risk);
            FAIL("expected Infeasible");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Infeasible);
            CHECK(std::string(e.what()).find("r_min") != std::string::npos);
        }
        OptimizerConfig boxed;
        boxed.default_bounds = {0.0, 0.4};
        try {
            solve_mean_variance(s, boxed, Objective::min_risk);
            FAIL("expected Infeasible");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::Infeasible);
            CHECK(std::string(e.what()).find("bounds") != std::string::npos);
        }
    }
}

TEST_CASE("solver matches simplex grid search for up to three assets") {
    Rng rng(21);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial % 3);
        auto s = random_stats(rng, n);
        OptimizerConfig cfg;
        cfg.lambda = 0.5 + 20.0 * rng.unit();
        auto utility = [&](const std::vector<double>& w) { return ret_of(s, w) - cfg.lambda * var_of(s, w); };
        auto neg_var = [&](const std::vector<double>& w) { return -var_of(s, w); };
        auto shp = [&](const std::vector<double>& w) { return ret_of(s, w) / std::sqrt(var_of(s, w)); };
        auto ret = [&](const std::vector<double>& w) { return ret_of(s, w); };

        auto wu = solve_mean_variance(s, cfg, Objective::utility).weights;
        auto wm = solve_mean_variance(s, cfg, Objective::min_risk).weights;
        auto ws = solve_mean_variance(s, cfg, Objective::max_sharpe).weights;
        auto wr = solve_mean_variance(s, cfg, Objective::max_return).weights;
        CHECK(utility(wu) >= grid_best(n, utility) - 1e-3);
        CHECK(neg_var(wm) >= grid_best(n, neg_var) - 1e-3);
        // The tangency point lies on the efficient frontier only when some asset has positive excess return.
        if (s.mu.maxCoeff() > 0.0) CHECK(shp(ws) >= grid_best(n, shp) - 1e-3);
        CHECK(ret(wr) >= grid_best(n, ret) - 1e-3);
    }
}

TEST_CASE("efficient frontier") {
    SUBCASE("single asset") {
        auto s = stats_of({0.01}, {{0.04}});
        for (const auto& p : efficient_frontier(s, log_spaced(0.1, 100, 5))) CHECK(p.weights->weights == std::vector<double>{1.0});
    }
    SUBCASE("two uncorrelated assets are monotone on a 20-point grid") {
        auto s = stats_of({0.02, 0.005}, {{0.04, 0.0}, {0.0, 0.01}});
        auto pts = efficient_frontier(s, log_spaced(0.01, 100, 20));
        REQUIRE(pts.size() == 20);
        for (std::size_t i = 1; i < pts.size(); ++i) {
            CHECK(pts[i].variance <= pts[i - 1].variance + 1e-12);
            CHECK(pts[i].expected_return <= pts[i - 1].expected_return + 1e-12);
            check_valid(*pts[i].weights);
        }
    }
    SUBCASE("one lambda matches the utility solve") {
        Rng rng(5);
        auto s = random_stats(rng, 3);
        OptimizerConfig cfg;
        cfg.lambda = 3.0;
        auto pts = efficient_frontier(s, {3.0}, cfg);
        auto w = solve_mean_variance(s, cfg, Objective::utility);
        CHECK(pts.size() == 1);
        CHECK(pts[0].weights->weights == w.weights);
    }
    SUBCASE("failures are marked per point") {
        auto s = stats_of({0.02, 0.005}, {{0.04, 0.0}, {0.0, 0.01}});
        OptimizerConfig cfg;
        cfg.r_min = 1.0;
        auto pts = efficient_frontier(s, {1.0, 2.0}, cfg);
        CHECK(!pts[0].weights);
        CHECK(pts[0].error->find("Infeasible") != std::string::npos);
    }
    SUBCASE("lambdas must ascend") {
        auto s = stats_of({0.01}, {{0.04}});
        CHECK_THROWS_AS(efficient_frontier(s, {2.0, 1.0}), Error);
        CHECK_THROWS_AS(efficient_frontier(s, {-1.0}), Error);
    }
}

TEST_CASE("apply_turnover_cap") {
    WeightVector prev{{}, {"A", "B"}, {0.5, 0.5}};
    WeightVector target{{}, {"A", "B"}, {0.7, 0.3}};
    SUBCASE("under the cap") { CHECK(apply_turnover_cap(prev, target, 1.0).weights == target.weights); }
    SUBCASE("zero cap keeps the previous weights") {
        auto w = apply_turnover_cap(prev, target, 0.0);
        CHECK(w.weight_of("A") == doctest::Approx(0.5));
        CHECK(w.weight_of("B") == doctest::Approx(0.5));
    }
    SUBCASE("half way") {
        auto w = apply_turnover_cap(prev, target, 0.2);
        CHECK(w.weight_of("A") == doctest::Approx(0.6).epsilon(1e-12));
        CHECK(w.weight_of("B") == doctest::Approx(0.4).epsilon(1e-12));
    }
    SUBCASE("disjoint symbol sets and random instances stay within the cap") {
        Rng rng(8);
        for (int i = 0; i < 100; ++i) {
            WeightVector a{{}, {"A", "B", "C"}, {}}, b{{}, {"B", "C", "D"}, {}};
            double sa = 0, sb = 0;
            for (int k = 0; k < 3; ++k) {
                a.weights.push_back(rng.unit());
                b.weights.push_back(rng.unit());
                sa += a.weights.back();
                sb += b.weights.back();
            }
            for (auto& x : a.weights) x /= sa;
            for (auto& x : b.weights) x /= sb;
            double cap = 2.0 * rng.unit();
            auto w = apply_turnover_cap(a, b, cap);
            CHECK(std::abs(w.sum() - 1.0) <= 1e-9);
            CHECK(turnover(a, w) <= cap + 1e-9);
            for (double x : w.weights) CHECK(x >= 0.0);
        }
    }
}

TEST_CASE("enforce_bounds") {
    OptimizerConfig cfg;
    cfg.default_bounds = {0.0, 0.6};
    SUBCASE("already inside is untouched") {
        WeightVector w{{}, {"A", "B"}, {0.5, 0.5}};
        CHECK(enforce_bounds(w, cfg).weights == w.weights);
    }
    SUBCASE("excess moves to the other asset") {
        auto w = enforce_bounds({{}, {"A", "B"}, {0.8, 0.2}}, cfg);
        CHECK(w.weights[0] == doctest::Approx(0.6).epsilon(1e-15));
        CHECK(w.weights[1] == doctest::Approx(0.4).epsilon(1e-15));
    }
    SUBCASE("single asset cannot fit under 0.6") {
        CHECK_THROWS_AS(enforce_bounds({{}, {"A"}, {1.0}}, cfg), Error);
    }
    SUBCASE("random inputs land inside the bounds") {
        Rng rng(31);
        cfg.asset_bounds["X0"] = {0.1, 0.3};
        for (int i = 0; i < 200; ++i) {
            const std::size_t n = 3 + rng.index(5); // two assets cannot reach 1 under 0.3 + 0.6
            WeightVector w{{}, names(n), {}};
            double total = 0;
            for (std::size_t k = 0; k < n; ++k) total += w.weights.emplace_back(rng.unit());
            for (auto& x : w.weights) x /= total;
            check_valid(enforce_bounds(w, cfg), cfg);
        }
    }
}
