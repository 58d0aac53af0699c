#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/backtest.hpp"
#include "sharpefolio/detail/rng.hpp"
#include "sharpefolio/error.hpp"

namespace sharpefolio {

void GpConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::ConfigInvalid, msg); };
    if (population < 2) fail("gp.population must be >= 2");
    if (max_depth < 1) fail("gp.max_depth must be >= 1");
    if (!(mutation_rate >= 0.0 && mutation_rate <= 1.0)) fail("gp.mutation_rate must be in [0, 1]");
    if (!(crossover_rate >= 0.0 && crossover_rate <= 1.0)) fail("gp.crossover_rate must be in [0, 1]");
    if (tournament_size < 1) fail("gp.tournament_size must be >= 1");
    if (!(top_quantile > 0.0 && top_quantile <= 1.0)) fail("gp.top_quantile must be in (0, 1]");
    if (!(cost_bps_per_side >= 0.0)) fail("gp.cost_bps_per_side must be >= 0");
    if (hill_climb_patience < 1) fail("gp.hill_climb_patience must be >= 1");
    for (const auto& s : seeds) {
        try {
            s.validate();
        } catch (const Error& e) {
            fail(std::string("gp seed expression: ") + e.what());
        }
        if (s.depth() > max_depth) fail("gp seed " + s.to_string() + " is deeper than gp.max_depth");
    }
}

double combine_fitness(double sharpe, double turnover, double mdd, const FitnessWeights& w) {
    return w.sharpe * sharpe - w.turnover * turnover - w.mdd * mdd;
}

AlphaScore score_alpha(const AlphaExpr& expr, const PricePanel& panel, const GpConfig& cfg) {
    const SignalPanel signal = eval_alpha(expr, panel);
    const std::size_t len = panel.length();
    const std::size_t first = std::max<std::size_t>(cfg.warmup, 2);
    if (len < 2 || first >= len - 1)
        throw Error(ErrorCode::InsufficientHistory, "panel too short for the scoring warm-up");

    // Decision at t reads the signal at t - 1 and trades assets priced on t - 1, t and t + 1.
    std::vector<WeightVector> plan(len);
    bool any = false;
    std::vector<std::size_t> valid;
    for (std::size_t t = first; t + 1 < len; ++t) {
        valid.clear();
        for (std::size_t a = 0; a < panel.asset_count(); ++a) {
            if (is_missing(panel.closes[a][t - 1]) || is_missing(panel.closes[a][t]) ||
                is_missing(panel.closes[a][t + 1]) || !std::isfinite(signal[a][t - 1]))
                continue;
            valid.push_back(a);
        }
        if (valid.size() < 2) continue;
        const double ref = signal[valid.front()][t - 1];
        if (std::all_of(valid.begin(), valid.end(), [&](std::size_t a) { return signal[a][t - 1] == ref; }))
            continue;
        std::stable_sort(valid.begin(), valid.end(),
                         [&](std::size_t p, std::size_t q) { return signal[p][t - 1] > signal[q][t - 1]; });
        const auto k = std::max<std::size_t>(
            1, static_cast<std::size_t>(std::ceil(cfg.top_quantile * static_cast<double>(valid.size()) - 1e-9)));
        valid.resize(k);
        std::sort(valid.begin(), valid.end());
        WeightVector& w = plan[t];
        w.date = panel.calendar[t];
        for (auto a : valid) {
            w.symbols.push_back(panel.assets[a]);
            w.weights.push_back(1.0 / static_cast<double>(k));
        }
        any = true;
    }
    if (!any)
        throw Error(ErrorCode::DegenerateSignal,
                    expr.to_string() + " never separates the assets cross-sectionally");

    BacktestConfig bt;
    bt.cost_bps_per_side = cfg.cost_bps_per_side;
    bt.risk.enabled = false;
    bt.selection.lookback = 2;
    const BacktestReport rep = run_backtest_with(
        panel, bt, [&](std::size_t t) { return plan[t]; }, first);

    if (!rep.metrics.sharpe)
        throw Error(ErrorCode::ZeroVariance, expr.to_string() + " produced a flat equity curve");
    AlphaScore s;
    s.sharpe = *rep.metrics.sharpe;
    s.turnover = rep.metrics.turnover.value_or(0.0);
    s.mdd = rep.metrics.mdd.value_or(0.0);
    s.fitness = combine_fitness(s.sharpe, s.turnover, s.mdd, cfg.fitness_weights);
    return s;
}

namespace {

constexpr AlphaOp kLeaves[] = {AlphaOp::price, AlphaOp::volume, AlphaOp::returns, AlphaOp::constant};
constexpr AlphaOp kUnary[] = {AlphaOp::neg,   AlphaOp::abs, AlphaOp::rolling_mean, AlphaOp::rolling_std,
                              AlphaOp::delay, AlphaOp::rsi, AlphaOp::macd,         AlphaOp::rank};
constexpr AlphaOp kBinary[] = {AlphaOp::add, AlphaOp::sub, AlphaOp::mul, AlphaOp::div_safe};
constexpr int kWindows[] = {2, 3, 5, 10, 20};
constexpr int kDelays[] = {1, 2, 3, 5};
constexpr int kRsiWindows[] = {5, 9, 14};
constexpr std::array<int, 3> kMacdSpans[] = {{12, 26, 9}, {5, 10, 3}, {8, 17, 9}};

using detail::Rng;

std::array<int, 3> random_params(AlphaOp op, Rng& rng) {
    switch (op) {
    case AlphaOp::rolling_mean:
    case AlphaOp::rolling_std: return {rng.pick(kWindows), 0, 0};
    case AlphaOp::delay: return {rng.pick(kDelays), 0, 0};
    case AlphaOp::rsi: return {rng.pick(kRsiWindows), 0, 0};
    case AlphaOp::macd: return rng.pick(kMacdSpans);
    default: return {0, 0, 0};
    }
}

AlphaExpr random_leaf(Rng& rng) {
    AlphaOp op = rng.pick(kLeaves);
    if (op == AlphaOp::constant) return AlphaExpr::constant(std::round(rng.unit() * 200.0 - 100.0) / 100.0);
    return AlphaExpr::leaf(op);
}

AlphaExpr random_tree(std::size_t depth, bool full, Rng& rng) {
    if (depth <= 1) return random_leaf(rng);
    if (!full && rng.chance(0.3)) return random_leaf(rng);
    if (rng.chance(0.5)) {
        AlphaOp op = rng.pick(kUnary);
        return AlphaExpr::unary(op, random_tree(depth - 1, full, rng), random_params(op, rng));
    }
    AlphaOp op = rng.pick(kBinary);
    AlphaExpr lhs = random_tree(depth - 1, full, rng);
    AlphaExpr rhs = random_tree(depth - 1, full, rng);
    return AlphaExpr::binary(op, std::move(lhs), std::move(rhs));
}

// Preorder node addressing.
AlphaExpr* find_node(AlphaExpr& root, std::size_t& k) {
    if (k == 0) return &root;
    --k;
    for (auto& c : root.children)
        if (auto* hit = find_node(c, k)) return hit;
    return nullptr;
}

AlphaExpr& node_at(AlphaExpr& root, std::size_t index) {
    std::size_t k = index;
    return *find_node(root, k);
}

void truncate(AlphaExpr& e, std::size_t depth_left, Rng& rng) {
    if (e.children.empty()) return;
    if (depth_left <= 1) {
        e = random_leaf(rng);
        return;
    }
    for (auto& c : e.children) truncate(c, depth_left - 1, rng);
}

AlphaExpr crossover(const AlphaExpr& a, const AlphaExpr& b, std::size_t max_depth, Rng& rng) {
    AlphaExpr child = a;
    AlphaExpr donor = b;
    AlphaExpr& slot = node_at(child, rng.index(child.size()));
    slot = node_at(donor, rng.index(donor.size()));
    truncate(child, max_depth, rng);
    return child;
}

// Swaps one node for another of the same arity, or redraws its parameters.
AlphaExpr point_mutation(const AlphaExpr& e, Rng& rng) {
    AlphaExpr out = e;
    AlphaExpr& n = node_at(out, rng.index(out.size()));
    switch (arity(n.op)) {
    case 0:
        n = random_leaf(rng);
        break;
    case 1:
        if (param_count(n.op) > 0 && rng.chance(0.5)) {
            n.params = random_params(n.op, rng);
        } else {
            n.op = rng.pick(kUnary);
            n.params = random_params(n.op, rng);
        }
        break;
    default:
        n.op = rng.pick(kBinary);
        break;
    }
    return out;
}

class Scorer {
public:
    Scorer(const PricePanel& panel, const GpConfig& cfg) : panel_(panel), cfg_(cfg) {}

    ScoredAlpha operator()(const AlphaExpr& expr) {
        auto key = expr.to_string();
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            Entry entry;
            try {
                entry.score = score_alpha(expr, panel_, cfg_);
            } catch (const Error&) {
                entry.failed = true;
                entry.score.fitness = std::numeric_limits<double>::lowest();
            }
            it = cache_.emplace(std::move(key), entry).first;
        }
        return {expr, it->second.score, it->second.failed};
    }

private:
    struct Entry {
        AlphaScore score;
        bool failed = false;
    };
    const PricePanel& panel_;
    const GpConfig& cfg_;
    std::unordered_map<std::string, Entry> cache_;
};

void sort_population(std::vector<ScoredAlpha>& pop) {
    std::stable_sort(pop.begin(), pop.end(), [](const ScoredAlpha& a, const ScoredAlpha& b) {
        if (a.score.fitness != b.score.fitness) return a.score.fitness > b.score.fitness;
        auto sa = a.expr.size(), sb = b.expr.size();
        if (sa != sb) return sa < sb;
        return a.expr.to_string() < b.expr.to_string();
    });
}

const ScoredAlpha& tournament(const std::vector<ScoredAlpha>& pop, std::size_t size, Rng& rng) {
    std::size_t best = rng.index(pop.size());
    for (std::size_t i = 1; i < size; ++i) {
        std::size_t c = rng.index(pop.size());
        // pop is sorted best first, so the lower index wins.
        best = std::min(best, c);
    }
    return pop[best];
}

} // namespace

EvolveResult evolve(const PricePanel& panel, const GpConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Scorer score(panel, cfg);
    EvolveResult result;

    std::vector<ScoredAlpha> pop;
    pop.reserve(cfg.population);
    for (const auto& s : cfg.seeds) {
        if (pop.size() == cfg.population) break;
        pop.push_back(score(s));
    }
    // Ramped half-and-half: depths cycle over 2..max_depth, alternating full and grow.
    const std::size_t min_depth = std::min<std::size_t>(2, cfg.max_depth);
    const std::size_t span = cfg.max_depth - min_depth + 1;
    for (std::size_t i = 0; pop.size() < cfg.population; ++i) {
        const std::size_t depth = min_depth + (i / 2) % span;
        pop.push_back(score(random_tree(depth, i % 2 == 0, rng)));
    }
    sort_population(pop);
    result.best_fitness.push_back(pop.front().score.fitness);

    for (std::size_t g = 0; g < cfg.generations; ++g) {
        std::vector<ScoredAlpha> next;
        next.reserve(cfg.population);
        next.push_back(pop.front());
        while (next.size() < cfg.population) {
            const ScoredAlpha& p1 = tournament(pop, cfg.tournament_size, rng);
            AlphaExpr child = p1.expr;
            if (rng.chance(cfg.crossover_rate)) {
                const ScoredAlpha& p2 = tournament(pop, cfg.tournament_size, rng);
                child = crossover(p1.expr, p2.expr, cfg.max_depth, rng);
            }
            if (rng.chance(cfg.mutation_rate)) child = point_mutation(child, rng);
            next.push_back(score(child));
        }
        pop = std::move(next);
        sort_population(pop);
        result.best_fitness.push_back(pop.front().score.fitness);
    }

    // Hill-climb the champion; an improved champion displaces the worst member.
    ScoredAlpha champ = pop.front();
    if (!champ.failed) {
        std::size_t rejections = 0;
        bool improved = false;
        for (std::size_t step = 0; step < cfg.hill_climb_max_steps && rejections < cfg.hill_climb_patience;
             ++step) {
            ScoredAlpha cand = score(point_mutation(champ.expr, rng));
            if (!cand.failed && cand.score.fitness > champ.score.fitness) {
                champ = std::move(cand);
                rejections = 0;
                improved = true;
            } else {
                ++rejections;
            }
        }
        if (improved) {
            pop.back() = std::move(champ);
            sort_population(pop);
        }
    }

    result.population = std::move(pop);
    return result;
}

} // namespace sharpefolio
