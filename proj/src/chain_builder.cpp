#include "narrative/chain_builder.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <ostream>
#include <thread>

#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"

namespace narrative {

ChainSet::ChainSet(std::vector<ChainLink> links) : links_(std::move(links)) {
    for (std::size_t i = 0; i < links_.size(); ++i) {
        const auto& l = links_[i];
        const auto month = MonthKey::of(l.current_date);
        const bool same_article = l.past.article_id == l.current.article_id;
        for (const auto& src : l.src_topics) {
            for (const auto& dst : l.dst_topics) {
                if (src == dst && same_article) continue;
                groups_[{src, dst, month}].push_back(i);
            }
        }
    }
}

std::span<const std::size_t> ChainSet::group(const std::string& src, const std::string& dst,
                                             const MonthKey& m) const {
    const auto it = groups_.find({src, dst, m});
    if (it == groups_.end()) return {};
    return it->second;
}

namespace {

bool admissible(const CausalPair& past, const CausalPair& current, const ChainOptions& options, int& d) {
    d = days_between(past.date, current.date);
    if (d <= 0) return false;
    if (options.max_lag_days && d > *options.max_lag_days) return false;
    return past.article_id != current.article_id;
}

ChainLink make_link(const CausalPair& past, const CausalPair& current, double similarity, int d) {
    return {PairRef::of(past), PairRef::of(current), past.date, current.date, similarity, d,
            past.topics,       current.topics};
}

}  // namespace

std::vector<ChainLink> link_pairs(std::span<const CausalPair> past_pool, const CausalPair& current,
                                  const EmbeddingTable& embeddings, const ChainOptions& options) {
    std::vector<ChainLink> out;
    const auto& cause = embeddings.at(current.key(Role::cause));
    for (const auto& past : past_pool) {
        const auto& effect = embeddings.at(past.key(Role::effect));
        int d = 0;
        if (!admissible(past, current, options, d)) continue;
        const double sim = cosine(effect, cause);
        if (sim >= options.threshold) out.push_back(make_link(past, current, sim, d));
    }
    return out;
}

ChainSet build_chains(std::span<const CausalPair> pairs, const EmbeddingTable& embeddings,
                      const ChainOptions& options) {
    if (!(options.threshold > 0.0 && options.threshold <= 1.0))
        throw Error("similarity threshold must lie in (0, 1]");

    // Date order; the past pool for a pair is the prefix of strictly earlier dates.
    std::vector<std::size_t> order(pairs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (pairs[a].date != pairs[b].date) return pairs[a].date < pairs[b].date;
        return PairRef::of(pairs[a]) < PairRef::of(pairs[b]);
    });

    // Resolve vectors once; a missing key fails before any linking starts.
    std::vector<const Vector*> effects(pairs.size());
    std::vector<const Vector*> causes(pairs.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        effects[i] = &embeddings.at(pairs[i].key(Role::effect));
        causes[i] = &embeddings.at(pairs[i].key(Role::cause));
    }

    std::vector<std::vector<ChainLink>> per_current(order.size());
    std::vector<std::exception_ptr> errors(order.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < order.size(); k = next++) {
            try {
                const auto& current = pairs[order[k]];
                const auto pool_end = std::lower_bound(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k),
                                                       current.date, [&](std::size_t i, const Day& day) {
                                                           return pairs[i].date < day;
                                                       });
                for (auto it = order.begin(); it != pool_end; ++it) {
                    const auto& past = pairs[*it];
                    int d = 0;
                    if (!admissible(past, current, options, d)) continue;
                    const double sim = cosine(*effects[*it], *causes[order[k]]);
                    if (sim >= options.threshold) per_current[k].push_back(make_link(past, current, sim, d));
                }
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, options.jobs);
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<ChainLink> links;
    for (auto& v : per_current)
        for (auto& l : v) links.push_back(std::move(l));
    std::sort(links.begin(), links.end(), [](const ChainLink& a, const ChainLink& b) {
        if (a.past != b.past) return a.past < b.past;
        return a.current < b.current;
    });
    return ChainSet(std::move(links));
}

namespace {

jsonl::Json ref_json(const PairRef& r) {
    return jsonl::Json::array({r.article_id, r.paragraph, r.sentence});
}

PairRef ref_from(const jsonl::Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& a = jsonl::get_array(rec, key, label, line);
    if (a.size() != 3 || !a[0].is_string() || !a[1].is_number_unsigned() || !a[2].is_number_unsigned())
        throw ParseError(label, line, std::string("`") + key + "` must be [article_id, paragraph, sentence]");
    return {a[0].get<std::string>(), a[1].get<std::size_t>(), a[2].get<std::size_t>()};
}

std::set<std::string> topics_from(const jsonl::Json& rec, const char* key, const std::string& label,
                                  std::size_t line) {
    std::set<std::string> out;
    for (const auto& t : jsonl::get_array(rec, key, label, line)) {
        if (!t.is_string()) throw ParseError(label, line, std::string("`") + key + "` entries must be strings");
        out.insert(t.get<std::string>());
    }
    return out;
}

Day day_from(const jsonl::Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto s = jsonl::get_string(rec, key, label, line);
    const auto day = parse_day(s);
    if (!day) throw ParseError(label, line, "unparseable date \"" + s + "\"");
    return *day;
}

}  // namespace

std::vector<ChainLink> read_chains(std::istream& in, const std::string& label) {
    std::vector<ChainLink> links;
    jsonl::for_each(in, label, [&](const jsonl::Json& rec, std::size_t line) {
        ChainLink l;
        l.past = ref_from(rec, "past", label, line);
        l.current = ref_from(rec, "current", label, line);
        l.past_date = day_from(rec, "past_date", label, line);
        l.current_date = day_from(rec, "current_date", label, line);
        l.similarity = jsonl::get_real(rec, "similarity", label, line);
        l.d = static_cast<int>(jsonl::get_int(rec, "d", label, line));
        if (l.d <= 0 || l.d != days_between(l.past_date, l.current_date))
            throw ParseError(label, line, "`d` must equal the positive day gap between the two dates");
        l.src_topics = topics_from(rec, "src_topics", label, line);
        l.dst_topics = topics_from(rec, "dst_topics", label, line);
        links.push_back(std::move(l));
    });
    return links;
}

std::vector<ChainLink> read_chains(const std::filesystem::path& path) {
    auto in = jsonl::open_in(path);
    return read_chains(in, path.string());
}

void write_chains(const std::vector<ChainLink>& links, std::ostream& out) {
    for (const auto& l : links) {
        jsonl::Json rec = jsonl::Json::object();
        rec["past"] = ref_json(l.past);
        rec["current"] = ref_json(l.current);
        rec["past_date"] = format_day(l.past_date);
        rec["current_date"] = format_day(l.current_date);
        rec["similarity"] = l.similarity;
        rec["d"] = l.d;
        rec["src_topics"] = l.src_topics;
        rec["dst_topics"] = l.dst_topics;
        out << jsonl::dump(rec) << '\n';
    }
}

}  // namespace narrative
