#include "narrative/topic_classifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <ostream>
#include <random>
#include <thread>

#include "narrative/embedder.hpp"
#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"

namespace narrative {

LabeledSet build_teacher_data(const CorpusStore& corpus, const std::string& topic) {
    LabeledSet set{topic, {}, {}};
    bool seen = false;
    for (const auto& a : corpus.articles()) {
        if (a.has_topic(topic)) {
            seen = true;
            if (a.topics.size() <= kMaxPositiveCodes) set.positives.push_back(a.id);
        } else {
            set.negatives.push_back(a.id);
        }
    }
    if (!seen) throw Error("topic \"" + topic + "\" does not appear in the corpus (no positive examples)");
    return set;
}

FeatureVector featurize(std::string_view text, ScriptProfile profile, std::size_t buckets) {
    std::map<std::uint32_t, int> counts;
    for (const auto& tok : tokenize(text, profile))
        ++counts[static_cast<std::uint32_t>(text::fnv1a(tok) % buckets)];
    FeatureVector x;
    x.reserve(counts.size());
    double sq = 0.0;
    for (const auto& [i, n] : counts) {
        const double w = 1.0 + std::log(static_cast<double>(n));
        x.emplace_back(i, w);
        sq += w * w;
    }
    if (sq > 0.0) {
        const double inv = 1.0 / std::sqrt(sq);
        for (auto& e : x) e.second *= inv;
    }
    return x;
}

FeatureVector article_features(const CorpusStore& corpus, const Article& article, std::size_t buckets) {
    std::string joined;
    for (const auto& p : corpus.paragraphs(article.id)) {
        if (!joined.empty()) joined += "\n\n";
        joined += p.text;
    }
    return featurize(joined, corpus.profile(), buckets);
}

double TopicModel::probability(const FeatureVector& x) const {
    double z = bias;
    for (const auto& [i, v] : x) z += weights[i] * v;
    return 1.0 / (1.0 + std::exp(-z));
}

bool TopicModel::relevant(const FeatureVector& x) const {
    return !x.empty() && probability(x) >= threshold;
}

TopicModel train(const LabeledSet& labeled, const CorpusStore& corpus, const TrainingConfig& config) {
    if (labeled.positives.empty() || labeled.negatives.empty())
        throw Error("cannot train topic \"" + labeled.topic + "\": need at least one positive and one negative");
    if (config.buckets == 0) throw Error("feature bucket count must be positive");

    struct Example {
        FeatureVector x;
        double y;
        double weight;
    };
    const double n = static_cast<double>(labeled.positives.size() + labeled.negatives.size());
    const double w_pos = n / (2.0 * static_cast<double>(labeled.positives.size()));
    const double w_neg = n / (2.0 * static_cast<double>(labeled.negatives.size()));

    std::vector<Example> examples;
    examples.reserve(labeled.positives.size() + labeled.negatives.size());
    for (const auto& id : labeled.positives)
        examples.push_back({article_features(corpus, corpus.at(id), config.buckets), 1.0, w_pos});
    for (const auto& id : labeled.negatives)
        examples.push_back({article_features(corpus, corpus.at(id), config.buckets), 0.0, w_neg});

    TopicModel model;
    model.topic = labeled.topic;
    model.buckets = config.buckets;
    model.weights.assign(config.buckets, 0.0);
    model.threshold = config.threshold;

    // std::shuffle is implementation-defined; this Fisher-Yates over mt19937_64
    // gives the same order on every platform.
    std::mt19937_64 rng(config.seed);
    std::vector<std::size_t> order(examples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        const double lr = config.learning_rate / (1.0 + 0.1 * epoch);
        for (const auto idx : order) {
            const auto& ex = examples[idx];
            const double g = (model.probability(ex.x) - ex.y) * ex.weight * lr;
            for (const auto& [i, v] : ex.x) model.weights[i] -= g * v;
            model.bias -= g;
        }
    }
    return model;
}

void TopicFlags::set(ParagraphKey key, std::set<std::string> topics) {
    flags_.insert_or_assign(std::move(key), std::move(topics));
}

const std::set<std::string>& TopicFlags::topics(const ParagraphKey& key) const {
    static const std::set<std::string> none;
    const auto it = flags_.find(key);
    return it == flags_.end() ? none : it->second;
}

TopicFlags classify_paragraphs(std::span<const TopicModel> models, const CorpusStore& corpus) {
    if (models.empty()) throw Error("classify_paragraphs needs at least one model");
    std::set<std::size_t> bucket_counts;
    for (const auto& m : models) {
        if (m.weights.size() != m.buckets)
            throw Error("model for topic \"" + m.topic + "\" has " + std::to_string(m.weights.size()) +
                        " weights but " + std::to_string(m.buckets) + " feature buckets");
        bucket_counts.insert(m.buckets);
    }

    TopicFlags flags;
    std::map<std::size_t, FeatureVector> features;
    for (const auto* p : corpus.all_paragraphs()) {
        features.clear();
        std::set<std::string> topics;
        for (const auto& m : models) {
            auto it = features.find(m.buckets);
            if (it == features.end())
                it = features.emplace(m.buckets, featurize(p->text, corpus.profile(), m.buckets)).first;
            if (m.relevant(it->second)) topics.insert(m.topic);
        }
        flags.set({p->article_id, p->ordinal}, std::move(topics));
    }
    return flags;
}

std::vector<TopicModel> train_all(const CorpusStore& corpus, const std::vector<std::string>& topics,
                                  const TrainingConfig& config, unsigned jobs) {
    std::vector<TopicModel> models(topics.size());
    std::vector<std::exception_ptr> errors(topics.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < topics.size(); i = next++) {
            try {
                models[i] = train(build_teacher_data(corpus, topics[i]), corpus, config);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(topics.size())));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
    return models;
}

TopicFlags read_flags(std::istream& in, const CorpusStore& corpus, const std::set<std::string>& allowed,
                      const std::string& label) {
    TopicFlags flags;
    jsonl::for_each(in, label, [&](const jsonl::Json& rec, std::size_t line) {
        ParagraphKey key;
        key.article_id = jsonl::get_string(rec, "article_id", label, line);
        const auto ordinal = jsonl::get_int(rec, "ordinal", label, line);
        if (ordinal < 0) throw ParseError(label, line, "negative ordinal");
        key.ordinal = static_cast<std::size_t>(ordinal);
        if (!corpus.paragraph(key))
            throw ParseError(label, line,
                             "no paragraph " + std::to_string(key.ordinal) + " in article \"" + key.article_id + "\"");
        if (flags.contains(key)) throw ParseError(label, line, "duplicate paragraph record");
        std::set<std::string> topics;
        for (const auto& t : jsonl::get_array(rec, "topics", label, line)) {
            if (!t.is_string()) throw ParseError(label, line, "`topics` entries must be strings");
            auto code = t.get<std::string>();
            if (!allowed.contains(code)) throw ParseError(label, line, "topic \"" + code + "\" is not configured");
            topics.insert(std::move(code));
        }
        flags.set(std::move(key), std::move(topics));
    });
    return flags;
}

TopicFlags read_flags(const std::filesystem::path& path, const CorpusStore& corpus,
                      const std::set<std::string>& allowed) {
    auto in = jsonl::open_in(path);
    return read_flags(in, corpus, allowed, path.string());
}

void write_flags(const TopicFlags& flags, std::ostream& out) {
    for (const auto& [key, topics] : flags.items()) {
        jsonl::Json rec = jsonl::Json::object();
        rec["article_id"] = key.article_id;
        rec["ordinal"] = key.ordinal;
        rec["topics"] = topics;
        out << jsonl::dump(rec) << '\n';
    }
}

std::map<MonthKey, std::size_t> topic_index(const TopicFlags& flags, const CorpusStore& corpus,
                                            const std::string& topic) {
    std::map<MonthKey, std::size_t> out;
    const auto span = corpus.span();
    if (!span) return out;
    for (const auto& m : span->months()) out[m] = 0;
    for (const auto& [key, topics] : flags.items()) {
        if (!topics.contains(topic)) continue;
        const auto* a = corpus.find(key.article_id);
        if (!a) continue;
        ++out[MonthKey::of(a->date)];
    }
    return out;
}

std::vector<std::string> load_topic_list(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open topic list " + path.string());
    std::vector<std::string> topics;
    std::set<std::string> seen;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (const auto tab = line.find('\t'); tab != std::string::npos) line.erase(tab);
        const auto code = std::string(text::trim_space(line));
        if (code.empty()) continue;
        if (!seen.insert(code).second) throw ParseError(path.string(), number, "duplicate topic \"" + code + "\"");
        topics.push_back(code);
    }
    return topics;
}

}  // namespace narrative
