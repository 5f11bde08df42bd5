// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "chain_oracle.hpp"
#include "gold.hpp"
#include "narrative/causal_extractor.hpp"
#include "narrative/chain_builder.hpp"
#include "narrative/graph_export.hpp"
#include "narrative/narrative_index.hpp"
#include "narrative/pipeline.hpp"
#include "narrative/topic_classifier.hpp"
#include "synthetic.hpp"
#include "test_util.hpp"

using namespace narrative;
namespace nt = narrative::testing;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

PipelineConfig synthetic_config(const std::filesystem::path& out) {
    auto c = load_config(nt::source_path("data/synthetic/pipeline.conf"));
    c.out = out;
    return c;
}

// Monthly index straight from the chain file: every month, every ordered
// topic pair, every link.
Outcome index_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    nt::TempDir dir("accept-index");
    const auto c = synthetic_config(dir.path());
    run_pipeline(c);

    struct RawLink {
        int year;
        unsigned month;
        int d;
        double sim;
        std::set<std::string> src, dst;
    };
    std::vector<RawLink> raw;
    {
        std::ifstream in(dir / stage_file::chains);
        std::string line;
        while (std::getline(in, line)) {
            const auto j = nlohmann::json::parse(line);
            const auto date = j["current_date"].get<std::string>();
            raw.push_back({std::stoi(date.substr(0, 4)), static_cast<unsigned>(std::stoi(date.substr(5, 2))),
                           j["d"].get<int>(), j["similarity"].get<double>(),
                           j["src_topics"].get<std::set<std::string>>(),
                           j["dst_topics"].get<std::set<std::string>>()});
        }
    }
    std::vector<std::string> topics;
    {
        std::ifstream in(c.topics);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) topics.push_back(line.substr(0, line.find('\t')));
    }
    std::map<std::tuple<std::string, std::string, int, unsigned>, double> from_csv;
    {
        std::ifstream in(dir / stage_file::series);
        std::string line;
        std::getline(in, line);
        while (std::getline(in, line)) {
            std::stringstream ss(line);
            std::string s, t, y, m, v;
            std::getline(ss, s, ',');
            std::getline(ss, t, ',');
            std::getline(ss, y, ',');
            std::getline(ss, m, ',');
            std::getline(ss, v, ',');
            from_csv[{s, t, std::stoi(y), static_cast<unsigned>(std::stoi(m))}] = std::stod(v);
        }
    }

    const double a = 0.05;
    const double b = std::log((1 + 2 * a) / a) / 1825.0;
    const ChainSet chains(read_chains(dir / stage_file::chains));
    const auto params = solve_decay(a, 1825);
    double worst = 0.0;
    std::size_t checked = 0, nonzero = 0;
    for (const auto& [key, csv_value] : from_csv) {
        const auto& [s, t, y, m] = key;
        double want = 0.0;
        for (const auto& l : raw)
            if (l.year == y && l.month == m && l.src.contains(s) && l.dst.contains(t))
                want += l.sim / (1.0 + a * std::exp(b * l.d));
        const double got = monthly_index(chains, s, t, {y, m}, params);
        worst = std::max({worst, std::abs(got - want), std::abs(csv_value - want)});
        ++checked;
        nonzero += want != 0.0;
    }
    const std::size_t expected = (topics.size() * (topics.size() - 1)) * 24;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {raw.size() == 25 && checked == expected && nonzero > 0 && worst <= 1e-9 && secs < 10.0,
            std::to_string(raw.size()) + " links, " + std::to_string(checked) + " values, max |diff| " +
                fmt("%.3g", worst) + ", " + fmt("%.2f", secs) + " s"};
}

Outcome decay_half_life() {
    double worst = 0.0;
    for (double a : {0.01, 0.05, 0.5, 1.0, 5.0}) {
        const auto p = solve_decay(a, 1825);
        worst = std::max(worst, std::abs(decay_weight(1825, p) / decay_weight(0, p) - 0.5));
    }
    return {worst <= 1e-12, "max |ratio - 0.5| " + fmt("%.3g", worst)};
}

Outcome threshold_gates() {
    auto pair = [](const char* id, const char* date) {
        CausalPair p;
        p.article_id = id;
        p.date = nt::day(date);
        p.topics = {"A"};
        return p;
    };
    const auto past = pair("past", "2020-01-01");
    const auto cur = pair("cur", "2020-01-31");
    const auto same_day = pair("cur", "2020-01-01");
    auto table = [&](const CausalPair& c, std::vector<double> e, std::vector<double> v) {
        EmbeddingTable t;
        t.insert(past.key(Role::effect), Vector::dense(e));
        t.insert(past.key(Role::cause), Vector::dense(std::vector<double>(e.size(), 0.0)));
        t.insert(c.key(Role::cause), Vector::dense(v));
        t.insert(c.key(Role::effect), Vector::dense(std::vector<double>(e.size(), 0.0)));
        return t;
    };
    const std::vector<CausalPair> pool{past};
    const auto at = link_pairs(pool, cur, table(cur, {1, 0, 0, 0}, {7, 7, 1, 1}), {}).size();
    const auto below =
        link_pairs(pool, cur, table(cur, {1, 0}, {0.699, std::sqrt(1 - 0.699 * 0.699)}), {}).size();
    const auto zero_gap = link_pairs(pool, same_day, table(same_day, {1, 0}, {1, 0}), {}).size();
    return {at == 1 && below == 0 && zero_gap == 0, "sim 0.70: " + std::to_string(at) + " link, sim 0.699: " +
                                                        std::to_string(below) + ", d = 0: " + std::to_string(zero_gap)};
}

Outcome grid_cardinality() {
    std::vector<std::string> topics;
    for (int i = 0; i < 40; ++i) topics.push_back("T" + std::to_string(i));
    const auto grid = full_grid(ChainSet(std::vector<ChainLink>{}), topics, {{2020, 1}, {2020, 3}},
                                solve_decay(0.05, 1825));
    return {grid.size() == 1560, std::to_string(grid.size()) + " series"};
}

Outcome extraction_fixture() {
    const auto lex = CueLexicon::english();
    std::size_t cued = 0, exact = 0, false_pos = 0;
    for (const auto& g : nt::load_gold()) {
        const auto pairs = extract_pairs(g.sentence, lex);
        if (g.cause.empty()) {
            false_pos += !pairs.empty();
            continue;
        }
        ++cued;
        exact += pairs.size() == 1 && pairs[0].cause_text == g.cause && pairs[0].effect_text == g.effect;
    }
    auto worked = [&](const std::string& s, const std::string& cause, const std::string& effect) {
        const auto p = extract_pairs(s, lex);
        return p.size() == 1 && p[0].cause_text == cause && p[0].effect_text == effect;
    };
    const bool w1 = worked(
        "Companies have increased their green energy investments in response to future strict environmental "
        "regulations introduced by the authorities",
        "future strict environmental regulations introduced by the authorities",
        "Companies have increased their green energy investments");
    const bool w2 = worked("The subprime loan problem will cause a global economic recession",
                           "The subprime loan problem", "a global economic recession");
    const double rate = cued ? static_cast<double>(exact) / static_cast<double>(cued) : 0.0;
    return {cued > 0 && rate >= 0.95 && w1 && w2,
            std::to_string(exact) + "/" + std::to_string(cued) + " exact spans, " + std::to_string(false_pos) +
                " uncued false positives, worked sentences " + (w1 && w2 ? "ok" : "FAILED")};
}

Outcome teacher_partition() {
    std::mt19937_64 rng(31);
    const std::vector<std::string> codes = {"A", "B", "C", "D", "E", "F"};
    std::size_t checked = 0, violations = 0, excluded = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<Article> articles;
        for (int i = 0; i < 40; ++i) {
            std::vector<std::string> t;
            for (const auto& c : codes)
                if (rng() % 3 == 0) t.push_back(c);
            articles.push_back(nt::article("x" + std::to_string(i), "2020-01-01", "body", t));
        }
        const CorpusStore corpus(std::move(articles), ScriptProfile::spaced);
        for (const auto& topic : codes) {
            bool present = false;
            for (const auto& a : corpus.articles()) present |= a.has_topic(topic);
            if (!present) continue;
            const auto set = build_teacher_data(corpus, topic);
            const std::set<std::string> pos(set.positives.begin(), set.positives.end());
            const std::set<std::string> neg(set.negatives.begin(), set.negatives.end());
            for (const auto& a : corpus.articles()) {
                const bool has = a.has_topic(topic);
                const bool p = pos.contains(a.id), n = neg.contains(a.id);
                const bool want_p = has && a.topics.size() <= 2, want_n = !has;
                violations += (p != want_p) || (n != want_n);
                excluded += !p && !n;
                ++checked;
            }
        }
    }
    return {violations == 0 && excluded > 0, std::to_string(checked) + " article/topic cases, " +
                                                 std::to_string(excluded) + " excluded, " +
                                                 std::to_string(violations) + " violations"};
}

Outcome classifier_f1() {
    TrainingConfig cfg;
    std::mt19937_64 rng(2024);
    const auto sep_train = nt::make_docs(rng, 200, 1.0);
    const auto sep_test = nt::make_docs(rng, 100, 1.0);
    const auto sep_corpus = nt::corpus_from(sep_train, rng, 0.0, "s");
    const double f_sep = nt::held_out_f1(train(build_teacher_data(sep_corpus, "A"), sep_corpus, cfg), sep_test,
                                         cfg.buckets);

    const auto noisy_train = nt::make_docs(rng, 400, 0.35);
    const auto noisy_test = nt::make_docs(rng, 200, 0.35);
    const auto noisy_corpus = nt::corpus_from(noisy_train, rng, 0.10, "n");
    const double f_noisy = nt::held_out_f1(train(build_teacher_data(noisy_corpus, "A"), noisy_corpus, cfg),
                                           noisy_test, cfg.buckets);
    return {f_sep == 1.0 && f_noisy >= 0.9,
            "separable F1 " + fmt("%.4f", f_sep) + ", 10% label noise F1 " + fmt("%.4f", f_noisy)};
}

Outcome chain_oracle() {
    std::mt19937_64 rng(4242);
    const std::vector<std::string> words = {"carbon", "tax", "rain",  "flood", "yen",    "rates",
                                            "solar",  "coal", "demand", "prices", "drought", "wages"};
    std::size_t links = 0, ties = 0;
    int failures = 0;
    std::string first_failure;
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 20 + static_cast<int>(rng() % 181);
        std::vector<CausalPair> pairs;
        for (int i = 0; i < n; ++i) {
            auto phrase = [&] {
                std::string s;
                const int k = 1 + static_cast<int>(rng() % 3);
                for (int w = 0; w < k; ++w) s += words[rng() % words.size()] + " ";
                return s;
            };
            CausalPair p;
            p.article_id = "a" + std::to_string(rng() % 60);
            p.sentence = static_cast<std::size_t>(i);
            p.date = Day{std::chrono::year{2020}, std::chrono::month{1 + static_cast<unsigned>(rng() % 12)},
                         std::chrono::day{1 + static_cast<unsigned>(rng() % 28)}};
            p.cause_text = phrase();
            p.effect_text = phrase();
            p.topics = {"A"};
            pairs.push_back(std::move(p));
        }
        EmbeddingTable table;
        for (const auto& p : pairs) {
            table.insert(p.key(Role::cause), embed(p.cause_text, ScriptProfile::spaced, 64));
            table.insert(p.key(Role::effect), embed(p.effect_text, ScriptProfile::spaced, 64));
        }
        ChainOptions opt;
        opt.threshold = 0.35 + 0.1 * static_cast<double>(trial % 6);
        opt.jobs = 1 + static_cast<unsigned>(trial % 4);
        const auto built = build_chains(pairs, table, opt);
        const auto oracle = nt::naive_links(pairs, table, opt.threshold, 1e-9);
        for (const auto& [k, o] : oracle) ties += std::abs(o.similarity - opt.threshold) < 1e-12;
        const auto diff = nt::compare_links(built.links(), oracle, opt.threshold);
        if (!diff.empty()) {
            ++failures;
            if (first_failure.empty()) first_failure = "; trial " + std::to_string(trial) + ": " + diff;
        }
        links += built.links().size();
    }
    return {failures == 0 && ties == 0, "50 trials, " + std::to_string(links) + " links, " +
                                            std::to_string(failures) + " mismatching trials, " +
                                            std::to_string(ties) + " threshold ties" + first_failure};
}

Outcome determinism() {
    nt::TempDir first("accept-det1"), second("accept-det2");
    run_pipeline(synthetic_config(first.path()));
    run_pipeline(synthetic_config(second.path()));
    const std::vector<std::string> files = {stage_file::corpus, stage_file::flags,  stage_file::pairs,
                                            stage_file::embeddings, stage_file::chains, stage_file::series,
                                            stage_file::matrix, stage_file::graph("dot"), stage_file::report};
    std::size_t same = 0;
    std::string differing;
    for (const auto& f : files) {
        const auto a = nt::read_text(first / f);
        if (!a.empty() && a == nt::read_text(second / f)) ++same;
        else differing += " " + f;
    }
    return {same == files.size(), std::to_string(same) + "/" + std::to_string(files.size()) +
                                      " files byte-identical" + (differing.empty() ? "" : ";" + differing)};
}

Outcome graph_mass() {
    double worst = 0.0;
    std::size_t fixtures = 0;
    auto check = [&](const NarrativeMatrix& m, const CategoryMap& map) {
        const auto g = aggregate_categories(m, map);
        double edge_sum = 0.0, cell_sum = 0.0;
        for (const auto& [k, w] : g.edges) edge_sum += w;
        for (const auto& [k, v] : m.cells) cell_sum += v;
        worst = std::max(worst, std::abs(edge_sum - cell_sum));
        ++fixtures;
    };

    nt::TempDir dir("accept-graph");
    const auto c = synthetic_config(dir.path());
    run_pipeline(c);
    check(read_matrix(dir / stage_file::matrix), load_category_map(*c.categories));

    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> value(0.0, 5.0);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 40);
        NarrativeMatrix m;
        CategoryMap map;
        for (int i = 0; i < n; ++i) {
            m.topics.push_back("t" + std::to_string(i));
            map.assign(m.topics.back(), "C" + std::to_string(rng() % 6));
        }
        for (const auto& s : m.topics)
            for (const auto& t : m.topics)
                if (s != t) m.cells[{s, t}] = value(rng);
        check(m, map);
    }
    return {worst <= 1e-9, std::to_string(fixtures) + " fixtures, max |edges - cells| " + fmt("%.3g", worst)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"monthly index equals brute-force evaluation", index_oracle},
        {"decay halves at the half-life", decay_half_life},
        {"similarity threshold and day-gap gates", threshold_gates},
        {"full grid cardinality for 40 topics", grid_cardinality},
        {"causal extraction gold fixture", extraction_fixture},
        {"teacher data partition", teacher_partition},
        {"classifier held-out F1", classifier_f1},
        {"chain builder equals naive reference", chain_oracle},
        {"pipeline determinism", determinism},
        {"graph mass conservation", graph_mass},
    };
    int failed = 0;
    for (const auto& [name, fn] : criteria) {
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s  %s (%s)\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        failed += !o.pass;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
