#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "narrative/chain_builder.hpp"
#include "narrative/corpus.hpp"

namespace narrative {

inline constexpr double kDefaultDecayA = 0.05;
inline constexpr int kDefaultHalfLifeDays = 1825;  // five years, no leap days

// Logistic decay weight(d) = 1 / (1 + a e^{b d}). `b` is always derived from
// `a` and the half-life so that weight(half_life) = weight(0) / 2.
struct DecayParams {
    double a = kDefaultDecayA;
    double b = 0.0;
    int half_life_days = kDefaultHalfLifeDays;
};

// b = ln((1 + 2a) / a) / half_life. Throws Error unless a > 0 and half_life > 0.
DecayParams solve_decay(double a, int half_life_days);

// Throws Error for d < 0.
double decay_weight(int d, const DecayParams& params);

// Sum of decay_weight(d) * similarity over the (src, dst, month) group.
double monthly_index(const ChainSet& chains, const std::string& src, const std::string& dst,
                     const MonthKey& month, const DecayParams& params);

struct NarrativeSeries {
    std::string src;
    std::string dst;
    std::map<MonthKey, double> values;
};

// One series per ordered topic pair in `topics` order, every month of `span`
// populated. The diagonal (src == dst) is skipped unless requested.
std::vector<NarrativeSeries> full_grid(const ChainSet& chains, const std::vector<std::string>& topics,
                                       const MonthRange& span, const DecayParams& params,
                                       bool include_diagonal = false, unsigned jobs = 1);

struct NarrativeMatrix {
    MonthRange period;
    std::vector<std::string> topics;  // row and column order
    std::map<std::pair<std::string, std::string>, double> cells;

    double total() const;
};

// Each cell is the mean over the months of [start, end]; months without a
// value count as zero. Throws Error when start > end.
NarrativeMatrix period_matrix(const std::vector<NarrativeSeries>& series, const MonthKey& start,
                              const MonthKey& end);

// Columns src_topic,dst_topic,year,month,value; values fixed to 9 decimals.
void write_series(const std::vector<NarrativeSeries>& series, std::ostream& out);
std::vector<NarrativeSeries> read_series(std::istream& in, const std::string& label = "<series>");
std::vector<NarrativeSeries> read_series(const std::filesystem::path& path);

// Header row `src\dst,<topics...>`, one row per source topic. Cells absent
// from the matrix (the diagonal) are left empty.
void write_matrix(const NarrativeMatrix& matrix, std::ostream& out);
NarrativeMatrix read_matrix(std::istream& in, const std::string& label = "<matrix>");
NarrativeMatrix read_matrix(const std::filesystem::path& path);

std::string format_value(double v);

}  // namespace narrative
