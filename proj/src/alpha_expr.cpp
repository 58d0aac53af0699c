#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <numeric>

#include "sharpefolio/alpha_gp.hpp"
#include "sharpefolio/error.hpp"
#include "sharpefolio/format.hpp"

namespace sharpefolio {

namespace {

constexpr AlphaOp kAllOps[] = {AlphaOp::price,   AlphaOp::volume,  AlphaOp::returns,      AlphaOp::constant,
                               AlphaOp::neg,     AlphaOp::abs,     AlphaOp::rolling_mean, AlphaOp::rolling_std,
                               AlphaOp::delay,   AlphaOp::rsi,     AlphaOp::macd,         AlphaOp::rank,
                               AlphaOp::add,     AlphaOp::sub,     AlphaOp::mul,          AlphaOp::div_safe};

constexpr double kDivEpsilon = 1e-12;

} // namespace

std::string_view to_string(AlphaOp op) {
    switch (op) {
    case AlphaOp::price: return "price";
    case AlphaOp::volume: return "volume";
    case AlphaOp::returns: return "returns";
    case AlphaOp::constant: return "constant";
    case AlphaOp::neg: return "neg";
    case AlphaOp::abs: return "abs";
    case AlphaOp::rolling_mean: return "rolling_mean";
    case AlphaOp::rolling_std: return "rolling_std";
    case AlphaOp::delay: return "delay";
    case AlphaOp::rsi: return "rsi";
    case AlphaOp::macd: return "macd";
    case AlphaOp::rank: return "rank";
    case AlphaOp::add: return "add";
    case AlphaOp::sub: return "sub";
    case AlphaOp::mul: return "mul";
    case AlphaOp::div_safe: return "div_safe";
    }
    return "?";
}

int arity(AlphaOp op) {
    switch (op) {
    case AlphaOp::price:
    case AlphaOp::volume:
    case AlphaOp::returns:
    case AlphaOp::constant:
        return 0;
    case AlphaOp::add:
    case AlphaOp::sub:
    case AlphaOp::mul:
    case AlphaOp::div_safe:
        return 2;
    default:
        return 1;
    }
}

int param_count(AlphaOp op) {
    switch (op) {
    case AlphaOp::rolling_mean:
    case AlphaOp::rolling_std:
    case AlphaOp::delay:
    case AlphaOp::rsi:
        return 1;
    case AlphaOp::macd:
        return 3;
    default:
        return 0;
    }
}

AlphaExpr AlphaExpr::leaf(AlphaOp op) {
    AlphaExpr e;
    e.op = op;
    return e;
}

AlphaExpr AlphaExpr::constant(double k) {
    AlphaExpr e;
    e.op = AlphaOp::constant;
    e.value = k;
    return e;
}

AlphaExpr AlphaExpr::unary(AlphaOp op, AlphaExpr child, std::array<int, 3> params) {
    AlphaExpr e;
    e.op = op;
    e.params = params;
    e.children.push_back(std::move(child));
    return e;
}

AlphaExpr AlphaExpr::binary(AlphaOp op, AlphaExpr lhs, AlphaExpr rhs) {
    AlphaExpr e;
    e.op = op;
    e.children.push_back(std::move(lhs));
    e.children.push_back(std::move(rhs));
    return e;
}

std::size_t AlphaExpr::depth() const {
    std::size_t d = 0;
    for (const auto& c : children) d = std::max(d, c.depth());
    return d + 1;
}

std::size_t AlphaExpr::size() const {
    std::size_t n = 1;
    for (const auto& c : children) n += c.size();
    return n;
}

std::size_t AlphaExpr::warmup() const {
    std::size_t below = 0;
    for (const auto& c : children) below = std::max(below, c.warmup());
    auto p = [&](int i) { return static_cast<std::size_t>(std::max(params[static_cast<std::size_t>(i)], 1)); };
    switch (op) {
    case AlphaOp::returns: return 1;
    case AlphaOp::rolling_mean:
    case AlphaOp::rolling_std: return below + p(0) - 1;
    case AlphaOp::delay:
    case AlphaOp::rsi: return below + p(0);
    case AlphaOp::macd: return below + std::max(p(0), p(1)) + p(2) - 2;
    default: return below;
    }
}

void AlphaExpr::validate() const {
    if (children.size() != static_cast<std::size_t>(arity(op)))
        throw Error(ErrorCode::MalformedTree, std::string(sharpefolio::to_string(op)) + " expects " +
                                                  std::to_string(arity(op)) + " operand(s)");
    for (int i = 0; i < param_count(op); ++i)
        if (params[static_cast<std::size_t>(i)] < 1)
            throw Error(ErrorCode::MalformedTree,
                        std::string(sharpefolio::to_string(op)) + " parameters must be >= 1");
    if (op == AlphaOp::constant && !std::isfinite(value))
        throw Error(ErrorCode::MalformedTree, "constant must be finite");
    for (const auto& c : children) c.validate();
}

std::string AlphaExpr::to_string() const {
    if (op == AlphaOp::constant) return format_number(value);
    if (children.empty()) return std::string(sharpefolio::to_string(op));
    std::string out = "(";
    out += sharpefolio::to_string(op);
    for (const auto& c : children) out += " " + c.to_string();
    for (int i = 0; i < param_count(op); ++i) out += " " + std::to_string(params[static_cast<std::size_t>(i)]);
    return out + ")";
}

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    AlphaExpr parse_all() {
        AlphaExpr e = parse_expr();
        skip_space();
        if (pos_ != text_.size()) fail("trailing input");
        e.validate();
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw Error(ErrorCode::MalformedTree, what + " at offset " + std::to_string(pos_) + " in '" +
                                                  std::string(text_) + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    std::string_view atom() {
        skip_space();
        std::size_t begin = pos_;
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        if (begin == pos_) fail("expected a token");
        return text_.substr(begin, pos_ - begin);
    }

    static std::optional<AlphaOp> op_named(std::string_view name) {
        for (auto op : kAllOps)
            if (op != AlphaOp::constant && sharpefolio::to_string(op) == name) return op;
        return std::nullopt;
    }

    AlphaExpr parse_expr() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        if (text_[pos_] == ')') fail("unexpected ')'");
        if (text_[pos_] != '(') {
            auto tok = atom();
            if (auto op = op_named(tok); op && arity(*op) == 0) return AlphaExpr::leaf(*op);
            double k = 0.0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), k);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("unknown leaf '" + std::string(tok) + "'");
            return AlphaExpr::constant(k);
        }
        ++pos_;
        auto name = atom();
        auto op = op_named(name);
        if (!op || arity(*op) == 0) fail("unknown operator '" + std::string(name) + "'");
        AlphaExpr e;
        e.op = *op;
        for (int i = 0; i < arity(*op); ++i) e.children.push_back(parse_expr());
        for (int i = 0; i < param_count(*op); ++i) {
            auto tok = atom();
            int v = 0;
            auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (ec != std::errc{} || ptr != tok.data() + tok.size()) fail("expected an integer parameter");
            e.params[static_cast<std::size_t>(i)] = v;
        }
        skip_space();
        if (pos_ >= text_.size() || text_[pos_] != ')') fail("expected ')'");
        ++pos_;
        return e;
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

using Series = std::vector<double>;

Series rolling(const Series& x, std::size_t w, bool stddev) {
    Series out(x.size(), kMissing);
    for (std::size_t t = w - 1; t < x.size(); ++t) {
        double sum = 0.0;
        bool ok = true;
        for (std::size_t k = t + 1 - w; k <= t; ++k) {
            if (std::isnan(x[k])) {
                ok = false;
                break;
            }
            sum += x[k];
        }
        if (!ok) continue;
        double mu = sum / static_cast<double>(w);
        if (!stddev) {
            out[t] = mu;
            continue;
        }
        if (w < 2) {
            out[t] = 0.0;
            continue;
        }
        double ss = 0.0;
        for (std::size_t k = t + 1 - w; k <= t; ++k) ss += (x[k] - mu) * (x[k] - mu);
        out[t] = std::sqrt(ss / static_cast<double>(w - 1));
    }
    return out;
}

// EMA seeded with the simple mean of the first `span` defined values; restarts after a gap.
Series ema(const Series& x, std::size_t span) {
    Series out(x.size(), kMissing);
    const double a = 2.0 / (static_cast<double>(span) + 1.0);
    std::size_t run = 0;
    double seed = 0.0, prev = 0.0;
    for (std::size_t t = 0; t < x.size(); ++t) {
        if (std::isnan(x[t])) {
            run = 0;
            seed = 0.0;
            continue;
        }
        ++run;
        if (run < span) {
            seed += x[t];
        } else if (run == span) {
            prev = (seed + x[t]) / static_cast<double>(span);
            out[t] = prev;
        } else {
            prev = a * x[t] + (1.0 - a) * prev;
            out[t] = prev;
        }
    }
    return out;
}

// Wilder RSI in [0, 100]; defined from the w-th change of an unbroken run.
Series rsi(const Series& x, std::size_t w) {
    Series out(x.size(), kMissing);
    std::size_t run = 0;
    double gain = 0.0, loss = 0.0;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (std::isnan(x[t]) || std::isnan(x[t - 1])) {
            run = 0;
            gain = loss = 0.0;
            continue;
        }
        double d = x[t] - x[t - 1];
        double up = d > 0.0 ? d : 0.0, down = d < 0.0 ? -d : 0.0;
        ++run;
        if (run <= w) {
            gain += up;
            loss += down;
            if (run < w) continue;
            gain /= static_cast<double>(w);
            loss /= static_cast<double>(w);
        } else {
            gain = (gain * static_cast<double>(w - 1) + up) / static_cast<double>(w);
            loss = (loss * static_cast<double>(w - 1) + down) / static_cast<double>(w);
        }
        if (loss == 0.0) out[t] = gain == 0.0 ? 50.0 : 100.0;
        else out[t] = 100.0 - 100.0 / (1.0 + gain / loss);
    }
    return out;
}

// MACD histogram: (EMA_fast - EMA_slow) minus its EMA over `signal` bars.
Series macd(const Series& x, std::size_t fast, std::size_t slow, std::size_t signal) {
    Series f = ema(x, fast), s = ema(x, slow);
    Series line(x.size(), kMissing);
    for (std::size_t t = 0; t < x.size(); ++t) line[t] = f[t] - s[t];
    Series sig = ema(line, signal);
    Series out(x.size(), kMissing);
    for (std::size_t t = 0; t < x.size(); ++t) out[t] = line[t] - sig[t];
    return out;
}

// Cross-sectional rank per day scaled to [0, 1], average rank on ties.
SignalPanel rank_cross_section(const SignalPanel& x) {
    SignalPanel out(x.size(), Series(x.empty() ? 0 : x.front().size(), kMissing));
    if (x.empty()) return out;
    std::vector<std::size_t> idx;
    for (std::size_t t = 0; t < x.front().size(); ++t) {
        idx.clear();
        for (std::size_t a = 0; a < x.size(); ++a)
            if (!std::isnan(x[a][t])) idx.push_back(a);
        if (idx.empty()) continue;
        if (idx.size() == 1) {
            out[idx[0]][t] = 0.5;
            continue;
        }
        std::sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) { return x[p][t] < x[q][t]; });
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && x[idx[j + 1]][t] == x[idx[i]][t]) ++j;
            double r = 0.5 * static_cast<double>(i + j) / static_cast<double>(idx.size() - 1);
            for (std::size_t k = i; k <= j; ++k) out[idx[k]][t] = r;
            i = j + 1;
        }
    }
    return out;
}

template <class F>
SignalPanel map_series(const SignalPanel& x, F&& f) {
    SignalPanel out;
    out.reserve(x.size());
    for (const auto& s : x) out.push_back(f(s));
    return out;
}

template <class F>
SignalPanel elementwise(const SignalPanel& x, F&& f) {
    SignalPanel out = x;
    for (auto& s : out)
        for (auto& v : s) v = f(v);
    return out;
}

template <class F>
SignalPanel combine(const SignalPanel& x, const SignalPanel& y, F&& f) {
    SignalPanel out = x;
    for (std::size_t a = 0; a < out.size(); ++a)
        for (std::size_t t = 0; t < out[a].size(); ++t) out[a][t] = f(x[a][t], y[a][t]);
    return out;
}

SignalPanel eval_node(const AlphaExpr& e, const PricePanel& panel) {
    const auto p = [&](int i) { return static_cast<std::size_t>(e.params[static_cast<std::size_t>(i)]); };
    switch (e.op) {
    case AlphaOp::price:
        return panel.closes;
    case AlphaOp::volume: {
        SignalPanel out = panel.volumes;
        for (std::size_t a = 0; a < out.size(); ++a)
            for (std::size_t t = 0; t < out[a].size(); ++t)
                if (is_missing(panel.closes[a][t])) out[a][t] = kMissing;
        return out;
    }
    case AlphaOp::returns:
        return map_series(panel.closes, [](const Series& c) {
            Series r(c.size(), kMissing);
            for (std::size_t t = 1; t < c.size(); ++t) r[t] = c[t] / c[t - 1] - 1.0;
            return r;
        });
    case AlphaOp::constant:
        return SignalPanel(panel.asset_count(), Series(panel.length(), e.value));
    default:
        break;
    }

    SignalPanel x = eval_node(e.children[0], panel);
    switch (e.op) {
    case AlphaOp::neg: return elementwise(x, [](double v) { return -v; });
    case AlphaOp::abs: return elementwise(x, [](double v) { return std::abs(v); });
    case AlphaOp::rolling_mean: return map_series(x, [&](const Series& s) { return rolling(s, p(0), false); });
    case AlphaOp::rolling_std: return map_series(x, [&](const Series& s) { return rolling(s, p(0), true); });
    case AlphaOp::delay:
        return map_series(x, [&](const Series& s) {
            Series out(s.size(), kMissing);
            for (std::size_t t = p(0); t < s.size(); ++t) out[t] = s[t - p(0)];
            return out;
        });
    case AlphaOp::rsi: return map_series(x, [&](const Series& s) { return rsi(s, p(0)); });
    case AlphaOp::macd: return map_series(x, [&](const Series& s) { return macd(s, p(0), p(1), p(2)); });
    case AlphaOp::rank: return rank_cross_section(x);
    default: break;
    }

    SignalPanel y = eval_node(e.children[1], panel);
    switch (e.op) {
    case AlphaOp::add: return combine(x, y, [](double a, double b) { return a + b; });
    case AlphaOp::sub: return combine(x, y, [](double a, double b) { return a - b; });
    case AlphaOp::mul: return combine(x, y, [](double a, double b) { return a * b; });
    case AlphaOp::div_safe:
        return combine(x, y, [](double a, double b) {
            if (std::isnan(a) || std::isnan(b)) return kMissing;
            return std::abs(b) < kDivEpsilon ? 0.0 : a / b;
        });
    default: break;
    }
    throw Error(ErrorCode::MalformedTree, "cannot evaluate operator " + std::string(to_string(e.op)));
}

} // namespace

AlphaExpr AlphaExpr::parse(std::string_view text) { return Parser(text).parse_all(); }

SignalPanel eval_alpha(const AlphaExpr& expr, const PricePanel& panel) {
    expr.validate();
    if (panel.length() <= expr.warmup())
        throw Error(ErrorCode::InsufficientHistory, "panel has " + std::to_string(panel.length()) +
                                                        " bars but " + expr.to_string() + " needs more than " +
                                                        std::to_string(expr.warmup()));
    return eval_node(expr, panel);
}

} // namespace sharpefolio
