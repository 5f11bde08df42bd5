#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "narrative/causal_extractor.hpp"
#include "narrative/corpus.hpp"
#include "narrative/embedder.hpp"

namespace narrative {

inline constexpr double kDefaultThreshold = 0.7;

// Location of a causal pair: one sentence of one paragraph.
struct PairRef {
    std::string article_id;
    std::size_t paragraph = 0;
    std::size_t sentence = 0;

    static PairRef of(const CausalPair& p) { return {p.article_id, p.paragraph, p.sentence}; }
    auto operator<=>(const PairRef&) const = default;
};

// A past pair whose effect resembles the cause of a later pair.
struct ChainLink {
    PairRef past;
    PairRef current;
    Day past_date{};
    Day current_date{};
    double similarity = 0.0;
    int d = 0;  // days from past to current, always > 0
    std::set<std::string> src_topics;
    std::set<std::string> dst_topics;

    bool operator==(const ChainLink&) const = default;
};

struct GroupKey {
    std::string src;
    std::string dst;
    MonthKey month;

    auto operator<=>(const GroupKey&) const = default;
};

// Links filed under every (src topic, dst topic) combination of their topic
// sets and the month of the current (result) pair.
class ChainSet {
public:
    ChainSet() = default;
    explicit ChainSet(std::vector<ChainLink> links);

    const std::vector<ChainLink>& links() const { return links_; }
    std::span<const std::size_t> group(const std::string& src, const std::string& dst, const MonthKey& m) const;
    const std::map<GroupKey, std::vector<std::size_t>>& groups() const { return groups_; }

private:
    std::vector<ChainLink> links_;
    std::map<GroupKey, std::vector<std::size_t>> groups_;
};

struct ChainOptions {
    double threshold = kDefaultThreshold;
    // Links with d above this are not formed; nullopt means unbounded.
    std::optional<int> max_lag_days;
    unsigned jobs = 1;
};

// One link per past pair p with d = days(p.date, current.date) > 0, a
// different article, and cosine(effect of p, cause of current) >= threshold.
// Throws Error on a missing embedding.
std::vector<ChainLink> link_pairs(std::span<const CausalPair> past_pool, const CausalPair& current,
                                  const EmbeddingTable& embeddings, const ChainOptions& options);

// All links among `pairs`, ordered by (past, current).
ChainSet build_chains(std::span<const CausalPair> pairs, const EmbeddingTable& embeddings,
                      const ChainOptions& options);

std::vector<ChainLink> read_chains(std::istream& in, const std::string& label = "<chains>");
std::vector<ChainLink> read_chains(const std::filesystem::path& path);
void write_chains(const std::vector<ChainLink>& links, std::ostream& out);

}  // namespace narrative
