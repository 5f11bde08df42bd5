#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "narrative/corpus.hpp"

namespace narrative {

// Per-topic teacher data. Positives carry the topic and at most two codes in
// total; negatives lack the topic. Articles with the topic and more than two
// codes belong to neither set.
struct LabeledSet {
    std::string topic;
    std::vector<std::string> positives;
    std::vector<std::string> negatives;
};

inline constexpr std::size_t kMaxPositiveCodes = 2;

// Throws Error when no article carries `topic`.
LabeledSet build_teacher_data(const CorpusStore& corpus, const std::string& topic);

using FeatureVector = std::vector<std::pair<std::uint32_t, double>>;

// Hashed token counts with 1 + ln(count) weighting, L2-normalized.
FeatureVector featurize(std::string_view text, ScriptProfile profile, std::size_t buckets);

struct TrainingConfig {
    std::uint64_t seed = 42;
    int epochs = 30;
    double learning_rate = 0.5;
    double threshold = 0.5;
    std::size_t buckets = std::size_t{1} << 18;
};

struct TopicModel {
    std::string topic;
    std::size_t buckets = 0;
    std::vector<double> weights;
    double bias = 0.0;
    double threshold = 0.5;

    // Logistic probability of relevance.
    double probability(const FeatureVector& x) const;
    // An empty feature vector is never relevant.
    bool relevant(const FeatureVector& x) const;
};

// Logistic-loss linear model trained by SGD over articles in a seeded order.
// Classes are reweighted to equal total mass. Throws Error when either class
// is empty.
TopicModel train(const LabeledSet& labeled, const CorpusStore& corpus, const TrainingConfig& config);

// Article features: the paragraphs joined back together.
FeatureVector article_features(const CorpusStore& corpus, const Article& article, std::size_t buckets);

class TopicFlags {
public:
    void set(ParagraphKey key, std::set<std::string> topics);
    const std::set<std::string>& topics(const ParagraphKey& key) const;
    bool contains(const ParagraphKey& key) const { return flags_.contains(key); }
    const std::map<ParagraphKey, std::set<std::string>>& items() const { return flags_; }
    std::size_t size() const { return flags_.size(); }

    bool operator==(const TopicFlags&) const = default;

private:
    std::map<ParagraphKey, std::set<std::string>> flags_;
};

// Every paragraph is scored by every model independently. Throws Error when
// `models` is empty or a model's weights disagree with its bucket count.
TopicFlags classify_paragraphs(std::span<const TopicModel> models, const CorpusStore& corpus);

// Trains one model per topic on up to `jobs` threads. Output order follows `topics`.
std::vector<TopicModel> train_all(const CorpusStore& corpus, const std::vector<std::string>& topics,
                                  const TrainingConfig& config, unsigned jobs = 1);

// Flag exchange file: one `{article_id, ordinal, topics}` record per line.
// Reading validates paragraphs against the corpus and topics against `allowed`.
TopicFlags read_flags(std::istream& in, const CorpusStore& corpus, const std::set<std::string>& allowed,
                      const std::string& label = "<flags>");
TopicFlags read_flags(const std::filesystem::path& path, const CorpusStore& corpus,
                      const std::set<std::string>& allowed);
void write_flags(const TopicFlags& flags, std::ostream& out);

// Monthly count of paragraphs flagged with `topic`, for every month of the
// corpus span (zero-filled).
std::map<MonthKey, std::size_t> topic_index(const TopicFlags& flags, const CorpusStore& corpus,
                                            const std::string& topic);

// Topic list file: one code per line, optional label after a tab; `#` starts a comment.
std::vector<std::string> load_topic_list(const std::filesystem::path& path);

}  // namespace narrative
