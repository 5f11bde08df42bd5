#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "narrative/error.hpp"
#include "narrative/text.hpp"

namespace narrative {

// An error raised inside a pipeline stage, prefixed with the stage name.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& cause)
        : Error("stage `" + stage + "` failed: " + cause), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

struct PipelineConfig {
    std::filesystem::path corpus;
    std::filesystem::path topics;
    std::string lexicon = "en";
    std::optional<ScriptProfile> profile;  // defaults from the lexicon
    bool lenient = false;
    std::optional<std::filesystem::path> flags;
    std::uint64_t seed = 42;
    int epochs = 30;
    double learning_rate = 0.5;
    double class_threshold = 0.5;
    std::size_t dim = std::size_t{1} << 20;
    std::optional<std::filesystem::path> external;
    double threshold = 0.7;
    std::optional<int> max_lag_days;
    double a = 0.05;
    int half_life_days = 1825;
    bool include_diagonal = false;
    std::optional<std::string> from;
    std::optional<std::string> to;
    std::optional<std::filesystem::path> categories;
    double min_weight = 0.0;
    std::string format = "dot";
    std::filesystem::path out = "out";
    unsigned jobs = 1;

    // Applies one `key = value` setting. Throws Error on an unknown key or a
    // value of the wrong type.
    void set(const std::string& key, const std::string& value);
    // Throws Error when an invariant is violated (threshold outside (0, 1], ...).
    void validate() const;
    ScriptProfile script_profile() const;

    static const std::vector<std::string>& keys();
};

// `key = value` lines; `#` starts a comment. Relative paths are resolved
// against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);
void apply_config(PipelineConfig& config, std::istream& in, const std::filesystem::path& base,
                  const std::string& label = "<config>");

// File names of the stage artifacts inside the output directory.
namespace stage_file {
inline constexpr const char* corpus = "corpus.jsonl";
inline constexpr const char* flags = "flags.jsonl";
inline constexpr const char* pairs = "pairs.jsonl";
inline constexpr const char* embeddings = "embeddings.jsonl";
inline constexpr const char* chains = "chains.jsonl";
inline constexpr const char* series = "series.csv";
inline constexpr const char* matrix = "matrix.csv";
inline constexpr const char* report = "report.json";
inline constexpr const char* timings = "timings.json";
std::string graph(const std::string& format);
}  // namespace stage_file

// Each stage reads its inputs from earlier stage files in `config.out` and
// returns the counts it contributes to the run report. Errors surface as
// StageError.
nlohmann::json run_ingest(const PipelineConfig& config);
nlohmann::json run_classify(const PipelineConfig& config);
nlohmann::json run_extract(const PipelineConfig& config);
nlohmann::json run_embed(const PipelineConfig& config);
nlohmann::json run_chain(const PipelineConfig& config);
nlohmann::json run_index(const PipelineConfig& config);
nlohmann::json run_matrix(const PipelineConfig& config);
nlohmann::json run_graph(const PipelineConfig& config);

// ingest -> classify -> extract -> embed -> chain -> index -> matrix -> graph.
// Writes report.json (counts only, reproducible) and timings.json.
nlohmann::json run_pipeline(const PipelineConfig& config);

}  // namespace narrative
