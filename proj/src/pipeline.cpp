#include "narrative/pipeline.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>

#include "narrative/causal_extractor.hpp"
#include "narrative/chain_builder.hpp"
#include "narrative/corpus.hpp"
#include "narrative/embedder.hpp"
#include "narrative/graph_export.hpp"
#include "narrative/jsonl.hpp"
#include "narrative/narrative_index.hpp"
#include "narrative/topic_classifier.hpp"

namespace narrative {

namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value) {
    T out{};
    const auto* end = value.data() + value.size();
    const auto [ptr, ec] = std::from_chars(value.data(), end, out);
    if (ec != std::errc{} || ptr != end || value.empty())
        throw Error("config key `" + key + "`: \"" + value + "\" is not a valid number");
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (value.empty() || end != value.c_str() + value.size())
        throw Error("config key `" + key + "`: \"" + value + "\" is not a valid number");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    const auto v = text::ascii_lower(value);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw Error("config key `" + key + "`: \"" + value + "\" is not a boolean");
}

}  // namespace

const std::vector<std::string>& PipelineConfig::keys() {
    static const std::vector<std::string> k = {
        "corpus",  "topics",         "lexicon",         "profile",    "lenient",   "flags",
        "seed",    "epochs",         "learning_rate",   "class_threshold", "dim", "external",
        "threshold", "max_lag_days", "a",               "half_life_days", "include_diagonal",
        "from",    "to",             "categories",      "min_weight", "format",    "out",
        "jobs"};
    return k;
}

void PipelineConfig::set(const std::string& key, const std::string& value) {
    if (key == "corpus") corpus = value;
    else if (key == "topics") topics = value;
    else if (key == "lexicon") lexicon = value;
    else if (key == "profile") {
        profile = parse_profile(value);
        if (!profile) throw Error("config key `profile`: expected spaced or unspaced");
    } else if (key == "lenient") lenient = parse_bool(key, value);
    else if (key == "flags") flags = value.empty() ? std::nullopt : std::optional<fs::path>(value);
    else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
    else if (key == "epochs") epochs = parse_number<int>(key, value);
    else if (key == "learning_rate") learning_rate = parse_double(key, value);
    else if (key == "class_threshold") class_threshold = parse_double(key, value);
    else if (key == "dim") dim = parse_number<std::size_t>(key, value);
    else if (key == "external") external = value.empty() ? std::nullopt : std::optional<fs::path>(value);
    else if (key == "threshold") threshold = parse_double(key, value);
    else if (key == "max_lag_days") {
        if (value.empty() || value == "none") max_lag_days.reset();
        else max_lag_days = parse_number<int>(key, value);
    } else if (key == "a") a = parse_double(key, value);
    else if (key == "half_life_days") half_life_days = parse_number<int>(key, value);
    else if (key == "include_diagonal") include_diagonal = parse_bool(key, value);
    else if (key == "from") from = value.empty() ? std::nullopt : std::optional<std::string>(value);
    else if (key == "to") to = value.empty() ? std::nullopt : std::optional<std::string>(value);
    else if (key == "categories") categories = value.empty() ? std::nullopt : std::optional<fs::path>(value);
    else if (key == "min_weight") min_weight = parse_double(key, value);
    else if (key == "format") format = value;
    else if (key == "out") out = value;
    else if (key == "jobs") jobs = parse_number<unsigned>(key, value);
    else throw Error("unknown config key `" + key + "`");
}

void PipelineConfig::validate() const {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw Error("threshold must lie in (0, 1]");
    if (!(class_threshold > 0.0 && class_threshold < 1.0)) throw Error("class_threshold must lie in (0, 1)");
    if (dim < 2) throw Error("dim must be at least 2");
    if (epochs < 0) throw Error("epochs must be non-negative");
    if (max_lag_days && *max_lag_days <= 0) throw Error("max_lag_days must be positive");
    if (!(a > 0.0)) throw Error("decay parameter a must be positive");
    if (half_life_days <= 0) throw Error("half_life_days must be positive");
    if (!(min_weight >= 0.0)) throw Error("min_weight must be non-negative");
    if (!parse_graph_format(format)) throw Error("unknown graph format \"" + format + "\" (expected dot or json)");
    if (from && !MonthKey::parse(*from)) throw Error("`from` must be YYYY-MM");
    if (to && !MonthKey::parse(*to)) throw Error("`to` must be YYYY-MM");
}

ScriptProfile PipelineConfig::script_profile() const {
    if (profile) return *profile;
    return lexicon == "ja" ? ScriptProfile::unspaced : ScriptProfile::spaced;
}

void apply_config(PipelineConfig& config, std::istream& in, const fs::path& base, const std::string& label) {
    static const std::set<std::string> path_keys = {"corpus", "topics", "flags", "external", "categories", "out"};
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const auto trimmed = text::trim_space(line);
        if (trimmed.empty()) continue;
        const auto eq = trimmed.find('=');
        if (eq == std::string_view::npos) throw ParseError(label, number, "expected key = value");
        const std::string key(text::trim_space(trimmed.substr(0, eq)));
        std::string value(text::trim_space(trimmed.substr(eq + 1)));
        const bool is_path = path_keys.contains(key) ||
                             (key == "lexicon" && value != "en" && value != "ja");
        if (is_path && !value.empty() && fs::path(value).is_relative()) value = (base / value).lexically_normal().string();
        try {
            config.set(key, value);
        } catch (const Error& e) {
            throw ParseError(label, number, e.what());
        }
    }
}

PipelineConfig load_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path.string());
    PipelineConfig config;
    apply_config(config, in, path.parent_path(), path.string());
    return config;
}

std::string stage_file::graph(const std::string& format) { return "graph." + format; }

namespace {

template <class Fn>
Json guarded(const char* stage, Fn&& fn) {
    try {
        return fn();
    } catch (const StageError&) {
        throw;
    } catch (const std::exception& e) {
        throw StageError(stage, e.what());
    }
}

CorpusStore load_stage_corpus(const PipelineConfig& c) {
    return parse_corpus(c.out / stage_file::corpus, CorpusOptions{c.script_profile(), false});
}

std::vector<std::string> load_topics(const PipelineConfig& c) {
    if (c.topics.empty()) throw Error("no topic list configured (`topics`)");
    auto topics = load_topic_list(c.topics);
    if (topics.size() < 2) throw Error("at least two topics are required");
    return topics;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& writer) {
    auto out = jsonl::open_out(path);
    writer(out);
    out.flush();
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace

Json run_ingest(const PipelineConfig& c) {
    return guarded("ingest", [&] {
        c.validate();
        if (c.corpus.empty()) throw Error("no corpus configured (`corpus`)");
        std::vector<std::string> warnings;
        const auto store = parse_corpus(c.corpus, CorpusOptions{c.script_profile(), c.lenient}, &warnings);
        write_file(c.out / stage_file::corpus, [&](std::ostream& o) { write_corpus(store, o); });
        for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
        return Json{{"articles", store.size()},
                    {"paragraphs", store.paragraph_count()},
                    {"rejected_lines", warnings.size()}};
    });
}

Json run_classify(const PipelineConfig& c) {
    return guarded("classify", [&] {
        c.validate();
        const auto corpus = load_stage_corpus(c);
        const auto topics = load_topics(c);
        TopicFlags flags;
        std::string source = "models";
        if (c.flags) {
            flags = read_flags(*c.flags, corpus, {topics.begin(), topics.end()});
            source = "file";
        } else if (corpus.paragraph_count() > 0) {
            TrainingConfig tc;
            tc.seed = c.seed;
            tc.epochs = c.epochs;
            tc.learning_rate = c.learning_rate;
            tc.threshold = c.class_threshold;
            const auto models = train_all(corpus, topics, tc, c.jobs);
            flags = classify_paragraphs(models, corpus);
        }
        write_file(c.out / stage_file::flags, [&](std::ostream& o) { write_flags(flags, o); });
        std::size_t flagged = 0, total = 0;
        Json per_topic = Json::object();
        for (const auto& t : topics) per_topic[t] = 0;
        for (const auto& [key, ts] : flags.items()) {
            flagged += ts.empty() ? 0 : 1;
            total += ts.size();
            for (const auto& t : ts) per_topic[t] = per_topic[t].get<std::size_t>() + 1;
        }
        return Json{{"source", source},
                    {"paragraphs", flags.size()},
                    {"flagged_paragraphs", flagged},
                    {"flags", total},
                    {"per_topic", per_topic}};
    });
}

Json run_extract(const PipelineConfig& c) {
    return guarded("extract", [&] {
        c.validate();
        const auto lexicon = CueLexicon::resolve(c.lexicon, c.script_profile());
        const auto corpus = load_stage_corpus(c);
        const auto topics = load_topics(c);
        const auto flags = read_flags(c.out / stage_file::flags, corpus, {topics.begin(), topics.end()});
        const auto result = extract_corpus(corpus, flags, lexicon);
        write_file(c.out / stage_file::pairs, [&](std::ostream& o) { write_pairs(result.pairs, o); });
        const auto& d = result.diagnostics;
        return Json{{"sentences", d.sentences},
                    {"cued_sentences", d.cued_sentences},
                    {"pairs", d.pairs},
                    {"dropped_no_boundary", d.dropped_no_boundary},
                    {"pairs_without_topics", d.pairs_without_topics}};
    });
}

Json run_embed(const PipelineConfig& c) {
    return guarded("embed", [&] {
        c.validate();
        const auto pairs = read_pairs(c.out / stage_file::pairs);
        const auto profile = c.script_profile();
        EmbeddingTable table;
        for (const auto& p : pairs) {
            table.insert(p.key(Role::cause), embed(p.cause_text, profile, c.dim));
            table.insert(p.key(Role::effect), embed(p.effect_text, profile, c.dim));
        }
        std::size_t external = 0;
        if (c.external) {
            std::set<ExpressionKey> known;
            for (const auto& p : pairs) {
                known.insert(p.key(Role::cause));
                known.insert(p.key(Role::effect));
            }
            const auto ext = load_external_embeddings(*c.external, &known);
            external = ext.size();
            if (ext.size() == known.size()) {
                table = ext;
            } else {
                table.merge_override(ext);
            }
        }
        write_file(c.out / stage_file::embeddings, [&](std::ostream& o) { write_embeddings(table, o); });
        return Json{{"vectors", table.size()}, {"external", external}, {"dim", table.dimension().value_or(c.dim)}};
    });
}

Json run_chain(const PipelineConfig& c) {
    return guarded("chain", [&] {
        c.validate();
        const auto pairs = read_pairs(c.out / stage_file::pairs);
        const auto table = load_external_embeddings(c.out / stage_file::embeddings);
        ChainOptions opt;
        opt.threshold = c.threshold;
        opt.max_lag_days = c.max_lag_days;
        opt.jobs = c.jobs;
        const auto chains = build_chains(pairs, table, opt);
        write_file(c.out / stage_file::chains, [&](std::ostream& o) { write_chains(chains.links(), o); });
        return Json{{"links", chains.links().size()}, {"groups", chains.groups().size()}};
    });
}

Json run_index(const PipelineConfig& c) {
    return guarded("index", [&] {
        c.validate();
        const auto corpus = load_stage_corpus(c);
        const auto topics = load_topics(c);
        const ChainSet chains(read_chains(c.out / stage_file::chains));
        const auto params = solve_decay(c.a, c.half_life_days);
        std::vector<NarrativeSeries> grid;
        if (const auto span = corpus.span())
            grid = full_grid(chains, topics, *span, params, c.include_diagonal, c.jobs);
        write_file(c.out / stage_file::series, [&](std::ostream& o) { write_series(grid, o); });
        std::size_t nonzero = 0;
        for (const auto& s : grid)
            for (const auto& [m, v] : s.values) nonzero += v != 0.0 ? 1 : 0;
        return Json{{"series", grid.size()},
                    {"months", corpus.span() ? corpus.span()->size() : 0},
                    {"nonzero_values", nonzero},
                    {"b", params.b}};
    });
}

Json run_matrix(const PipelineConfig& c) {
    return guarded("matrix", [&] {
        c.validate();
        const auto series = read_series(c.out / stage_file::series);
        std::optional<MonthKey> start = c.from ? MonthKey::parse(*c.from) : std::nullopt;
        std::optional<MonthKey> end = c.to ? MonthKey::parse(*c.to) : std::nullopt;
        if (!start || !end) {
            const auto span = load_stage_corpus(c).span();
            if (!start && span) start = span->first;
            if (!end && span) end = span->last;
        }
        NarrativeMatrix matrix;
        if (start && end) matrix = period_matrix(series, *start, *end);
        write_file(c.out / stage_file::matrix, [&](std::ostream& o) { write_matrix(matrix, o); });
        return Json{{"cells", matrix.cells.size()},
                    {"from", start ? start->str() : ""},
                    {"to", end ? end->str() : ""},
                    {"total", matrix.total()}};
    });
}

Json run_graph(const PipelineConfig& c) {
    return guarded("graph", [&] {
        c.validate();
        const auto matrix = read_matrix(c.out / stage_file::matrix);
        CategoryMap map;
        if (c.categories) {
            map = load_category_map(*c.categories);
        } else {
            for (const auto& t : matrix.topics) map.assign(t, t);
        }
        const auto graph = aggregate_categories(matrix, map);
        const auto format = *parse_graph_format(c.format);
        write_file(c.out / stage_file::graph(c.format),
                   [&](std::ostream& o) { export_graph(graph, c.min_weight, format, o, &map); });
        std::size_t kept = 0;
        for (const auto& [k, w] : graph.edges) kept += w >= c.min_weight ? 1 : 0;
        return Json{{"nodes", graph.nodes.size()}, {"edges", kept}, {"total_weight", graph.total()}};
    });
}

Json run_pipeline(const PipelineConfig& c) {
    using Clock = std::chrono::steady_clock;
    struct Stage {
        const char* name;
        Json (*fn)(const PipelineConfig&);
    };
    static constexpr Stage stages[] = {{"ingest", run_ingest},   {"classify", run_classify}, {"extract", run_extract},
                                       {"embed", run_embed},     {"chain", run_chain},       {"index", run_index},
                                       {"matrix", run_matrix},   {"graph", run_graph}};
    Json report = Json::object();
    Json timings = Json::object();
    for (const auto& s : stages) {
        const auto t0 = Clock::now();
        report[s.name] = s.fn(c);
        timings[s.name] = std::chrono::duration<double>(Clock::now() - t0).count();
    }
    write_file(c.out / stage_file::report, [&](std::ostream& o) { o << report.dump(2) << '\n'; });
    write_file(c.out / stage_file::timings, [&](std::ostream& o) { o << timings.dump(2) << '\n'; });
    return report;
}

}  // namespace narrative
