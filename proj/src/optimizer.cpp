#include "sharpefolio/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sharpefolio/error.hpp"
#include "sharpefolio/format.hpp"

namespace sharpefolio {

double WeightVector::sum() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

double WeightVector::weight_of(std::string_view symbol) const {
    for (std::size_t i = 0; i < symbols.size(); ++i)
        if (symbols[i] == symbol) return weights[i];
    return 0.0;
}

Bounds OptimizerConfig::bounds_for(const std::string& symbol) const {
    auto it = asset_bounds.find(symbol);
    return it == asset_bounds.end() ? default_bounds : it->second;
}

void OptimizerConfig::validate() const {
    if (!(lambda > 0.0)) throw Error(ErrorCode::ConfigInvalid, "optimizer.lambda must be > 0");
    if (!(blend_alpha >= 0.0 && blend_alpha <= 1.0))
        throw Error(ErrorCode::ConfigInvalid, "optimizer.blend_alpha must lie in [0, 1]");
    if (turnover_cap && !(*turnover_cap >= 0.0))
        throw Error(ErrorCode::ConfigInvalid, "optimizer.turnover_cap must be >= 0");
    auto check = [](const Bounds& b, const std::string& what) {
        if (!(b.lower >= 0.0 && b.upper <= 1.0 && b.lower <= b.upper))
            throw Error(ErrorCode::ConfigInvalid, what + " must satisfy 0 <= lower <= upper <= 1");
    };
    check(default_bounds, "optimizer bounds");
    for (const auto& [symbol, b] : asset_bounds) check(b, "optimizer bounds for " + symbol);
    if (max_iterations < 1) throw Error(ErrorCode::ConfigInvalid, "optimizer.max_iterations must be >= 1");
    if (!(tolerance > 0.0)) throw Error(ErrorCode::ConfigInvalid, "optimizer.tolerance must be > 0");
}

std::string_view to_string(Objective objective) {
    switch (objective) {
    case Objective::max_return: return "max_return";
    case Objective::min_risk: return "min_risk";
    case Objective::max_sharpe: return "max_sharpe";
    case Objective::utility: return "utility";
    }
    return "utility";
}

std::optional<Objective> parse_objective(std::string_view text) {
    for (auto o : {Objective::max_return, Objective::min_risk, Objective::max_sharpe, Objective::utility})
        if (to_string(o) == text) return o;
    return std::nullopt;
}

AssetStats AssetStats::from_moments(std::vector<std::string> symbols, Eigen::VectorXd mu, Eigen::MatrixXd cov,
                                    double risk_free) {
    AssetStats s;
    const auto n = static_cast<Eigen::Index>(symbols.size());
    s.symbols = std::move(symbols);
    s.mu = std::move(mu);
    s.cov = std::move(cov);
    s.risk_free = risk_free;
    s.sigma = s.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    s.sharpe = Eigen::VectorXd::Zero(n);
    s.zero_variance.assign(static_cast<std::size_t>(n), false);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (s.sigma(i) > 0.0) s.sharpe(i) = (s.mu(i) - risk_free) / s.sigma(i);
        else s.zero_variance[static_cast<std::size_t>(i)] = true;
    }
    return s;
}

AssetStats estimate_stats(const ReturnPanel& returns, const std::vector<std::string>& symbols, std::size_t end,
                          std::size_t window, double risk_free) {
    if (window < 2) throw Error(ErrorCode::InsufficientHistory, "stats window must be >= 2");
    if (end >= returns.length() || end + 1 < window)
        throw Error(ErrorCode::InsufficientHistory, "not enough returns for a window of " + std::to_string(window));
    const auto n = static_cast<Eigen::Index>(symbols.size());
    const auto w = static_cast<Eigen::Index>(window);
    Eigen::MatrixXd x(w, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        auto it = std::lower_bound(returns.assets.begin(), returns.assets.end(), symbols[static_cast<std::size_t>(j)]);
        if (it == returns.assets.end() || *it != symbols[static_cast<std::size_t>(j)])
            throw Error(ErrorCode::InsufficientHistory, "no returns for " + symbols[static_cast<std::size_t>(j)]);
        const auto& series = returns.returns[static_cast<std::size_t>(it - returns.assets.begin())];
        for (Eigen::Index k = 0; k < w; ++k) {
            double r = series[end + 1 - window + static_cast<std::size_t>(k)];
            if (is_missing(r))
                throw Error(ErrorCode::InsufficientHistory,
                            symbols[static_cast<std::size_t>(j)] + " has missing returns in the window");
            x(k, j) = r;
        }
    }
    Eigen::VectorXd mu = x.colwise().mean().transpose();
    Eigen::MatrixXd centered = x.rowwise() - mu.transpose();
    Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(w - 1);
    // Exactly constant columns have zero variance; make that exact.
    for (Eigen::Index j = 0; j < n; ++j) {
        bool constant = (x.col(j).array() == x(0, j)).all();
        if (constant) {
            cov.row(j).setZero();
            cov.col(j).setZero();
        }
    }
    return AssetStats::from_moments(symbols, std::move(mu), std::move(cov), risk_free);
}

AssetStats estimate_stats(const ReturnPanel& returns, std::size_t window, double risk_free) {
    if (returns.length() == 0) throw Error(ErrorCode::InsufficientHistory, "empty return panel");
    return estimate_stats(returns, returns.assets, returns.length() - 1, window, risk_free);
}

BlendResult blend_weights(const AssetStats& stats, double alpha) {
    if (stats.size() == 0) throw Error(ErrorCode::NoAssets, "blend needs at least one asset");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw Error(ErrorCode::ConfigInvalid, "blend alpha must lie in [0, 1]");
    const std::size_t n = stats.size();
    BlendResult out;
    std::vector<std::size_t> usable;
    for (std::size_t i = 0; i < n; ++i) {
        if (stats.zero_variance[i] || !(stats.sigma(static_cast<Eigen::Index>(i)) > 0.0))
            out.excluded.push_back(stats.symbols[i]);
        else
            usable.push_back(i);
    }
    if (usable.empty()) throw Error(ErrorCode::SingularStats, "every asset has zero variance");

    std::vector<double> inv_vol(n, 0.0), pos_sharpe(n, 0.0);
    double inv_sum = 0.0, sharpe_sum = 0.0;
    for (auto i : usable) {
        inv_vol[i] = 1.0 / stats.sigma(static_cast<Eigen::Index>(i));
        pos_sharpe[i] = std::max(stats.sharpe(static_cast<Eigen::Index>(i)), 0.0);
        inv_sum += inv_vol[i];
        sharpe_sum += pos_sharpe[i];
    }
    if (!(sharpe_sum > 0.0)) {
        out.sharpe_leg_equal_weight = true;
        for (auto i : usable) pos_sharpe[i] = 1.0;
        sharpe_sum = static_cast<double>(usable.size());
    }

    out.weights.symbols = stats.symbols;
    out.weights.weights.assign(n, 0.0);
    double total = 0.0;
    for (auto i : usable) {
        double w = alpha * inv_vol[i] / inv_sum + (1.0 - alpha) * pos_sharpe[i] / sharpe_sum;
        out.weights.weights[i] = w;
        total += w;
    }
    for (auto& w : out.weights.weights) w /= total;
    return out;
}

namespace {

struct FeasibleSet {
    Eigen::VectorXd lower;
    Eigen::VectorXd upper;
    std::optional<double> r_min;
    Eigen::VectorXd mu;
};

FeasibleSet make_feasible_set(const AssetStats& stats, const OptimizerConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(stats.size());
    FeasibleSet fs{Eigen::VectorXd(n), Eigen::VectorXd(n), cfg.r_min, stats.mu};
    for (Eigen::Index i = 0; i < n; ++i) {
        Bounds b = cfg.bounds_for(stats.symbols[static_cast<std::size_t>(i)]);
        fs.lower(i) = b.lower;
        fs.upper(i) = b.upper;
    }
    return fs;
}

// Largest mu'w over {sum w = 1, l <= w <= u}: fill the best assets first.
Eigen::VectorXd greedy_max_return(const Eigen::VectorXd& mu, const Eigen::VectorXd& lower,
                                  const Eigen::VectorXd& upper) {
    const auto n = mu.size();
    Eigen::VectorXd w = lower;
    double budget = 1.0 - lower.sum();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return mu(a) > mu(b); });
    for (auto i : order) {
        double add = std::min(budget, upper(i) - lower(i));
        w(i) += add;
        budget -= add;
        if (budget <= 0.0) break;
    }
    return w;
}

void check_feasible(const FeasibleSet& fs) {
    if ((fs.lower.array() > fs.upper.array()).any())
        throw Error(ErrorCode::Infeasible, "bounds conflict: some lower bound exceeds its upper bound");
    if (fs.lower.sum() > 1.0 + 1e-12 || fs.upper.sum() < 1.0 - 1e-12)
        throw Error(ErrorCode::Infeasible, "bounds conflict: weights cannot sum to 1 within the bounds");
    if (fs.r_min) {
        double best = fs.mu.dot(greedy_max_return(fs.mu, fs.lower, fs.upper));
        if (best < *fs.r_min - 1e-12)
            throw Error(ErrorCode::Infeasible, "r_min too high: best attainable expected return is " +
                                                   format_number(best) + " < " + format_number(*fs.r_min));
    }
}

// Euclidean projection onto {sum w = 1, l <= w <= u}: w = clamp(v - tau, l, u).
Eigen::VectorXd project_box_simplex(const Eigen::VectorXd& v, const Eigen::VectorXd& lower,
                                    const Eigen::VectorXd& upper) {
    auto mass = [&](double tau) { return (v.array() - tau).max(lower.array()).min(upper.array()).sum(); };
    double lo = (v - upper).minCoeff(); // mass(lo) = sum(upper) >= 1
    double hi = (v - lower).maxCoeff(); // mass(hi) = sum(lower) <= 1
    for (int it = 0; it < 200 && hi - lo > 0.0; ++it) {
        double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (mass(mid) > 1.0) lo = mid;
        else hi = mid;
    }
    double tau = 0.5 * (lo + hi);
    // Solve exactly on the linear piece that contains tau.
    double fixed = 0.0, free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        double x = v(i) - tau;
        if (x <= lower(i)) fixed += lower(i);
        else if (x >= upper(i)) fixed += upper(i);
        else {
            free_sum += v(i);
            ++free_count;
        }
    }
    if (free_count > 0) tau = (free_sum + fixed - 1.0) / free_count;
    return (v.array() - tau).max(lower.array()).min(upper.array()).matrix();
}

Eigen::VectorXd project(const Eigen::VectorXd& v, const FeasibleSet& fs) {
    Eigen::VectorXd w = project_box_simplex(v, fs.lower, fs.upper);
    if (!fs.r_min || fs.mu.dot(w) >= *fs.r_min) return w;
    // Return floor active: shift along mu with multiplier eta >= 0 until mu'w reaches r_min.
    double scale = std::max(fs.mu.cwiseAbs().maxCoeff(), 1e-300);
    double lo = 0.0, hi = 1.0 / scale;
    for (int it = 0; it < 200 && fs.mu.dot(project_box_simplex(v + hi * fs.mu, fs.lower, fs.upper)) < *fs.r_min; ++it)
        hi *= 2.0;
    for (int it = 0; it < 100; ++it) {
        double mid = 0.5 * (lo + hi);
        if (fs.mu.dot(project_box_simplex(v + mid * fs.mu, fs.lower, fs.upper)) < *fs.r_min) lo = mid;
        else hi = mid;
    }
    return project_box_simplex(v + hi * fs.mu, fs.lower, fs.upper);
}

double largest_eigenvalue(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
    return std::max(es.eigenvalues().maxCoeff(), 0.0);
}

// Minimizes -linear'w + w'Q w over the feasible set with accelerated projected gradient.
Eigen::VectorXd solve_qp(const Eigen::VectorXd& linear, const Eigen::MatrixXd& quad, const FeasibleSet& fs,
                         const OptimizerConfig& cfg) {
    const auto n = linear.size();
    double lipschitz = 2.0 * largest_eigenvalue(quad);
    if (!(lipschitz > 0.0)) {
        Eigen::VectorXd w = greedy_max_return(linear, fs.lower, fs.upper);
        return fs.r_min ? project(w, fs) : w;
    }
    const double step = 1.0 / lipschitz;
    auto grad = [&](const Eigen::VectorXd& w) -> Eigen::VectorXd { return 2.0 * (quad * w) - linear; };

    Eigen::VectorXd x = project(Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), fs);
    Eigen::VectorXd y = x;
    double t = 1.0;
    double change = std::numeric_limits<double>::infinity();
    for (int it = 0; it < cfg.max_iterations; ++it) {
        Eigen::VectorXd next = project(y - step * grad(y), fs);
        change = (next - x).cwiseAbs().maxCoeff();
        if ((y - next).dot(next - x) > 0.0) t = 1.0; // momentum is pointing uphill: restart
        double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        y = next + ((t - 1.0) / t_next) * (next - x);
        x = std::move(next);
        t = t_next;
        if (change < cfg.tolerance) return x;
    }
    double gap = (x - project(x - step * grad(x), fs)).norm() * lipschitz;
    throw Error(ErrorCode::NotConverged, "no convergence after " + std::to_string(cfg.max_iterations) +
                                             " iterations (projected-gradient norm " + format_number(gap) +
                                             ", last step " + format_number(change) + ")");
}

WeightVector to_weights(const AssetStats& stats, const Eigen::VectorXd& w) {
    WeightVector out;
    out.symbols = stats.symbols;
    out.weights.assign(w.data(), w.data() + w.size());
    return out;
}

Eigen::VectorXd solve_utility(const AssetStats& stats, const FeasibleSet& fs, const OptimizerConfig& cfg,
                              double lambda) {
    return solve_qp(stats.mu, lambda * stats.cov, fs, cfg);
}

double sharpe_of(const AssetStats& stats, const Eigen::VectorXd& w) {
    double var = w.dot(stats.cov * w);
    double excess = stats.mu.dot(w) - stats.risk_free;
    if (!(var > 0.0)) return excess > 0.0 ? std::numeric_limits<double>::infinity()
                                          : -std::numeric_limits<double>::infinity();
    return excess / std::sqrt(var);
}

Eigen::VectorXd solve_max_sharpe(const AssetStats& stats, const FeasibleSet& fs, const OptimizerConfig& cfg) {
    double spread = stats.mu.maxCoeff() - stats.mu.minCoeff();
    double var_scale = stats.cov.diagonal().maxCoeff();
    double scale = (spread > 0.0 && var_scale > 0.0) ? spread / var_scale : 1.0;
    auto grid = log_spaced(1e-3 * scale, 1e4 * scale, 50);

    std::vector<Eigen::VectorXd> points;
    std::vector<double> scores;
    for (double lam : grid) {
        points.push_back(solve_utility(stats, fs, cfg, lam));
        scores.push_back(sharpe_of(stats, points.back()));
    }
    auto best_it = std::max_element(scores.begin(), scores.end());
    auto k = static_cast<std::size_t>(best_it - scores.begin());
    Eigen::VectorXd best = points[k];
    double best_score = *best_it;

    // Golden-section refinement in log(lambda) on the bracket around the best grid point.
    double a = std::log(grid[k == 0 ? 0 : k - 1]);
    double b = std::log(grid[std::min(k + 1, grid.size() - 1)]);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    auto eval = [&](double log_lam) {
        Eigen::VectorXd w = solve_utility(stats, fs, cfg, std::exp(log_lam));
        double s = sharpe_of(stats, w);
        if (s > best_score) {
            best_score = s;
            best = w;
        }
        return s;
    };
    double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
    double fc = eval(c), fd = eval(d);
    for (int it = 0; it < 40 && b - a > 1e-9; ++it) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = eval(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = eval(d);
        }
    }
    return best;
}

} // namespace

WeightVector solve_mean_variance(const AssetStats& stats, const OptimizerConfig& cfg, Objective objective) {
    cfg.validate();
    if (stats.size() == 0) throw Error(ErrorCode::NoAssets, "optimizer needs at least one asset");
    FeasibleSet fs = make_feasible_set(stats, cfg);
    check_feasible(fs);
    switch (objective) {
    case Objective::max_return: {
        Eigen::VectorXd w = greedy_max_return(stats.mu, fs.lower, fs.upper);
        return to_weights(stats, w);
    }
    case Objective::min_risk:
        return to_weights(stats, solve_qp(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(stats.size())),
                                          stats.cov, fs, cfg));
    case Objective::utility:
        return to_weights(stats, solve_utility(stats, fs, cfg, cfg.lambda));
    case Objective::max_sharpe:
        return to_weights(stats, solve_max_sharpe(stats, fs, cfg));
    }
    throw Error(ErrorCode::ConfigInvalid, "unknown objective");
}

WeightVector enforce_bounds(const WeightVector& w, const OptimizerConfig& cfg) {
    const auto n = static_cast<Eigen::Index>(w.symbols.size());
    Eigen::VectorXd v(n), lower(n), upper(n);
    bool inside = std::abs(w.sum() - 1.0) <= 1e-12;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        Bounds b = cfg.bounds_for(w.symbols[k]);
        v(i) = w.weights[k];
        lower(i) = b.lower;
        upper(i) = b.upper;
        inside = inside && v(i) >= b.lower && v(i) <= b.upper;
    }
    if (inside) return w;
    check_feasible(FeasibleSet{lower, upper, std::nullopt, Eigen::VectorXd::Zero(n)});
    Eigen::VectorXd p = project_box_simplex(v, lower, upper);
    WeightVector out = w;
    for (Eigen::Index i = 0; i < n; ++i) out.weights[static_cast<std::size_t>(i)] = p(i);
    return out;
}

double turnover(const WeightVector& a, const WeightVector& b) {
    double total = 0.0;
    for (std::size_t i = 0; i < a.symbols.size(); ++i) total += std::abs(a.weights[i] - b.weight_of(a.symbols[i]));
    for (std::size_t i = 0; i < b.symbols.size(); ++i)
        if (std::find(a.symbols.begin(), a.symbols.end(), b.symbols[i]) == a.symbols.end())
            total += std::abs(b.weights[i]);
    return total;
}

WeightVector apply_turnover_cap(const WeightVector& prev, const WeightVector& target, double t_max) {
    if (!(t_max >= 0.0)) throw Error(ErrorCode::ConfigInvalid, "turnover cap must be >= 0");
    double move = turnover(prev, target);
    if (move <= t_max) return target;

    WeightVector out;
    out.date = target.date;
    out.symbols = target.symbols;
    for (const auto& s : prev.symbols)
        if (std::find(out.symbols.begin(), out.symbols.end(), s) == out.symbols.end()) out.symbols.push_back(s);
    const double theta = t_max / move;
    out.weights.reserve(out.symbols.size());
    for (const auto& s : out.symbols) {
        double p = prev.weight_of(s);
        out.weights.push_back(p + theta * (target.weight_of(s) - p));
    }
    double total = out.sum();
    if (total > 0.0)
        for (auto& w : out.weights) w /= total;
    return out;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t count) {
    std::vector<double> out;
    if (count == 0) return out;
    if (count == 1) return {lo};
    const double a = std::log(lo), b = std::log(hi);
    for (std::size_t i = 0; i < count; ++i)
        out.push_back(std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1)));
    out.front() = lo;
    out.back() = hi;
    return out;
}

std::vector<FrontierPoint> efficient_frontier(const AssetStats& stats, const std::vector<double>& lambdas,
                                              const OptimizerConfig& cfg) {
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (!(lambdas[i] > 0.0)) throw Error(ErrorCode::ConfigInvalid, "frontier lambdas must be positive");
        if (i > 0 && !(lambdas[i] > lambdas[i - 1]))
            throw Error(ErrorCode::ConfigInvalid, "frontier lambdas must be sorted ascending");
    }
    std::vector<FrontierPoint> out;
    out.reserve(lambdas.size());
    for (double lam : lambdas) {
        FrontierPoint p;
        p.lambda = lam;
        try {
            OptimizerConfig point_cfg = cfg;
            point_cfg.lambda = lam;
            WeightVector w = solve_mean_variance(stats, point_cfg, Objective::utility);
            p.expected_return = portfolio_return(stats, w);
            p.variance = portfolio_variance(stats, w);
            p.weights = std::move(w);
        } catch (const Error& e) {
            p.expected_return = kMissing;
            p.variance = kMissing;
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

double portfolio_return(const AssetStats& stats, const WeightVector& w) {
    double r = 0.0;
    for (std::size_t i = 0; i < stats.size(); ++i) r += stats.mu(static_cast<Eigen::Index>(i)) * w.weight_of(stats.symbols[i]);
    return r;
}

double portfolio_variance(const AssetStats& stats, const WeightVector& w) {
    Eigen::VectorXd x(static_cast<Eigen::Index>(stats.size()));
    for (std::size_t i = 0; i < stats.size(); ++i) x(static_cast<Eigen::Index>(i)) = w.weight_of(stats.symbols[i]);
    return x.dot(stats.cov * x);
}

} // namespace sharpefolio
