#include "sharpefolio/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <ostream>
#include <sstream>

#include "sharpefolio/error.hpp"
#include "sharpefolio/format.hpp"
#include "sharpefolio/risk.hpp"

namespace sharpefolio {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::MissingFile, "cannot write " + path.string());
    return out;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

} // namespace

void write_equity_csv(std::ostream& out, const BacktestReport& rep) {
    out << "date,equity,exposure,cost\n";
    for (std::size_t i = 0; i < rep.equity_curve.size(); ++i) {
        out << rep.dates[i].to_string() << ',' << format_number(rep.equity_curve[i]) << ',';
        if (i < rep.exposures.size()) out << format_number(rep.exposures[i]) << ',' << format_number(rep.costs_paid[i]);
        else out << ',';
        out << '\n';
    }
}

void write_weights_csv(std::ostream& out, const BacktestReport& rep) {
    out << "date,symbol,weight\n";
    for (const auto& w : rep.weights_history) {
        std::vector<std::size_t> order(w.symbols.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return w.symbols[a] < w.symbols[b]; });
        for (auto i : order)
            out << w.date.to_string() << ',' << w.symbols[i] << ',' << format_number(w.weights[i]) << '\n';
    }
}

void write_strategy_report(const std::filesystem::path& dir, const BacktestReport& rep) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::MissingFile, "cannot create " + dir.string() + ": " + ec.message());
    {
        auto out = open_out(dir / "equity.csv");
        write_equity_csv(out, rep);
    }
    {
        auto out = open_out(dir / "weights.csv");
        write_weights_csv(out, rep);
    }
    {
        auto out = open_out(dir / "metrics.json");
        out << to_json(rep.metrics).dump(2) << '\n';
    }
    {
        auto out = open_out(dir / "risk.csv");
        write_risk_trace(out, rep.risk_trace);
    }
}

void write_comparison_csv(std::ostream& out, const std::vector<std::pair<std::string, MetricsBlock>>& rows) {
    out << "strategy";
    for (auto f : kMetricsFields) out << ',' << f;
    out << '\n';
    for (const auto& [name, m] : rows) {
        out << name;
        for (const auto& [field, value] : fields(m)) out << ',' << format_number(value);
        out << '\n';
    }
}

void write_frontier_csv(std::ostream& out, const std::vector<std::string>& symbols,
                        const std::vector<FrontierPoint>& points) {
    std::vector<std::string> sorted = symbols;
    std::sort(sorted.begin(), sorted.end());
    out << "lambda,expected_return,variance";
    for (const auto& s : sorted) out << ',' << s;
    out << '\n';
    for (const auto& p : points) {
        out << format_number(p.lambda) << ',';
        if (p.weights) out << format_number(p.expected_return) << ',' << format_number(p.variance);
        else out << ',';
        for (const auto& s : sorted) {
            out << ',';
            if (p.weights) out << format_number(p.weights->weight_of(s));
        }
        out << '\n';
    }
}

void write_universe_csv(std::ostream& out, const UniverseSnapshot& snapshot) {
    out << "rank,symbol,label,slope,vol,rolling_sharpe\n";
    for (const auto& m : snapshot.members)
        out << m.rank << ',' << m.label.symbol << ',' << to_string(m.label.label) << ','
            << format_number(m.label.slope) << ',' << format_number(m.label.vol) << ','
            << format_number(m.label.rolling_sharpe) << '\n';
}

void write_alphas_csv(std::ostream& out, const std::vector<ScoredAlpha>& population) {
    out << "rank,fitness,sharpe,turnover,mdd,expression\n";
    for (std::size_t i = 0; i < population.size(); ++i) {
        const auto& a = population[i];
        out << i + 1 << ',';
        if (a.failed) out << ",,,";
        else
            out << format_number(a.score.fitness) << ',' << format_number(a.score.sharpe) << ','
                << format_number(a.score.turnover) << ',' << format_number(a.score.mdd);
        out << ',' << csv_field(a.expr.to_string()) << '\n';
    }
}

std::vector<double> read_equity_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::MissingFile, "cannot open " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaViolation, path.string() + " is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> header;
    {
        std::istringstream hs(line);
        std::string h;
        while (std::getline(hs, h, ',')) header.push_back(h);
    }
    auto col = std::find(header.begin(), header.end(), "equity");
    if (col == header.end())
        throw Error(ErrorCode::SchemaViolation, path.string() + " line 1: no 'equity' column");
    const auto idx = static_cast<std::size_t>(col - header.begin());

    std::vector<double> equity;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::size_t i = 0;
        bool found = false;
        while (std::getline(ls, field, ',')) {
            if (i++ != idx) continue;
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size())
                throw Error(ErrorCode::SchemaViolation,
                            path.string() + " line " + std::to_string(line_no) + ": bad equity value '" + field + "'");
            equity.push_back(v);
            found = true;
            break;
        }
        if (!found)
            throw Error(ErrorCode::SchemaViolation, path.string() + " line " + std::to_string(line_no) + ": missing equity");
    }
    if (equity.empty()) throw Error(ErrorCode::EmptySeries, path.string() + " has no equity rows");
    return equity;
}

} // namespace sharpefolio
