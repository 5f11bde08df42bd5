#include "narrative/narrative_index.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <set>
#include <thread>

#include "narrative/error.hpp"

namespace narrative {

DecayParams solve_decay(double a, int half_life_days) {
    if (!(a > 0.0) || !std::isfinite(a)) throw Error("decay parameter a must be positive");
    if (half_life_days <= 0) throw Error("half-life must be a positive number of days");
    return {a, std::log((1.0 + 2.0 * a) / a) / half_life_days, half_life_days};
}

double decay_weight(int d, const DecayParams& params) {
    if (d < 0) throw Error("day gap must be non-negative");
    return 1.0 / (1.0 + params.a * std::exp(params.b * d));
}

double monthly_index(const ChainSet& chains, const std::string& src, const std::string& dst,
                     const MonthKey& month, const DecayParams& params) {
    double sum = 0.0;
    for (const auto i : chains.group(src, dst, month)) {
        const auto& link = chains.links()[i];
        sum += decay_weight(link.d, params) * link.similarity;
    }
    return sum;
}

std::vector<NarrativeSeries> full_grid(const ChainSet& chains, const std::vector<std::string>& topics,
                                       const MonthRange& span, const DecayParams& params,
                                       bool include_diagonal, unsigned jobs) {
    std::vector<NarrativeSeries> grid;
    for (const auto& src : topics)
        for (const auto& dst : topics)
            if (include_diagonal || src != dst) grid.push_back({src, dst, {}});

    const auto months = span.months();
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < grid.size(); k = next++) {
            auto& s = grid[k];
            for (const auto& m : months) s.values.emplace(m, monthly_index(chains, s.src, s.dst, m, params));
        }
    };
    const unsigned n = std::max(1u, jobs);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    return grid;
}

double NarrativeMatrix::total() const {
    double sum = 0.0;
    for (const auto& [k, v] : cells) sum += v;
    return sum;
}

NarrativeMatrix period_matrix(const std::vector<NarrativeSeries>& series, const MonthKey& start,
                              const MonthKey& end) {
    if (end < start) throw Error("matrix period start " + start.str() + " is after end " + end.str());
    NarrativeMatrix m{{start, end}, {}, {}};
    const double n = static_cast<double>(m.period.size());
    std::set<std::string> seen;
    auto note = [&](const std::string& t) {
        if (seen.insert(t).second) m.topics.push_back(t);
    };
    for (const auto& s : series) {
        note(s.src);
        note(s.dst);
        double sum = 0.0;
        for (auto it = s.values.lower_bound(start); it != s.values.end() && it->first <= end; ++it)
            sum += it->second;
        m.cells[{s.src, s.dst}] = sum / n;
    }
    return m;
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9f", v);
    return buf;
}

namespace {

void check_code(const std::string& code) {
    if (code.find_first_of(",\n\r\"") != std::string::npos)
        throw Error("topic code \"" + code + "\" cannot be written to a table (contains a separator)");
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        out.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double parse_real(const std::string& s, const std::string& label, std::size_t line) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw ParseError(label, line, "bad number \"" + s + "\"");
    return v;
}

bool getline_trimmed(std::istream& in, std::string& line) {
    if (!std::getline(in, line)) return false;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return true;
}

}  // namespace

void write_series(const std::vector<NarrativeSeries>& series, std::ostream& out) {
    out << "src_topic,dst_topic,year,month,value\n";
    char ym[32];
    for (const auto& s : series) {
        check_code(s.src);
        check_code(s.dst);
        for (const auto& [m, v] : s.values) {
            std::snprintf(ym, sizeof ym, "%04d,%u", m.year, m.month);
            out << s.src << ',' << s.dst << ',' << ym << ',' << format_value(v) << '\n';
        }
    }
}

std::vector<NarrativeSeries> read_series(std::istream& in, const std::string& label) {
    std::vector<NarrativeSeries> out;
    std::string line;
    std::size_t number = 0;
    if (!getline_trimmed(in, line) || line != "src_topic,dst_topic,year,month,value")
        throw ParseError(label, 1, "missing series header");
    ++number;
    while (getline_trimmed(in, line)) {
        ++number;
        if (line.empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != 5) throw ParseError(label, number, "expected 5 columns");
        const auto ym = MonthKey::parse(cols[2] + "-" + (cols[3].size() == 1 ? "0" + cols[3] : cols[3]));
        if (!ym) throw ParseError(label, number, "bad year/month");
        if (out.empty() || out.back().src != cols[0] || out.back().dst != cols[1])
            out.push_back({cols[0], cols[1], {}});
        if (!out.back().values.emplace(*ym, parse_real(cols[4], label, number)).second)
            throw ParseError(label, number, "duplicate month " + ym->str());
    }
    return out;
}

std::vector<NarrativeSeries> read_series(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_series(in, path.string());
}

void write_matrix(const NarrativeMatrix& matrix, std::ostream& out) {
    out << "src\\dst";
    for (const auto& t : matrix.topics) {
        check_code(t);
        out << ',' << t;
    }
    out << '\n';
    for (const auto& src : matrix.topics) {
        out << src;
        for (const auto& dst : matrix.topics) {
            out << ',';
            if (const auto it = matrix.cells.find({src, dst}); it != matrix.cells.end()) out << format_value(it->second);
        }
        out << '\n';
    }
}

NarrativeMatrix read_matrix(std::istream& in, const std::string& label) {
    NarrativeMatrix m;
    std::string line;
    if (!getline_trimmed(in, line)) throw ParseError(label, 1, "empty matrix file");
    auto header = split_csv(line);
    if (header.empty() || header.front() != "src\\dst") throw ParseError(label, 1, "missing matrix header");
    m.topics.assign(header.begin() + 1, header.end());
    std::size_t number = 1;
    std::size_t row = 0;
    while (getline_trimmed(in, line)) {
        ++number;
        if (line.empty()) continue;
        const auto cols = split_csv(line);
        if (cols.size() != m.topics.size() + 1) throw ParseError(label, number, "ragged matrix row");
        if (row >= m.topics.size() || cols[0] != m.topics[row])
            throw ParseError(label, number, "row label \"" + cols[0] + "\" out of order");
        for (std::size_t c = 1; c < cols.size(); ++c) {
            if (cols[c].empty()) continue;
            m.cells[{cols[0], m.topics[c - 1]}] = parse_real(cols[c], label, number);
        }
        ++row;
    }
    if (row != m.topics.size()) throw ParseError(label, number, "matrix has fewer rows than columns");
    return m;
}

NarrativeMatrix read_matrix(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    return read_matrix(in, path.string());
}

}  // namespace narrative
