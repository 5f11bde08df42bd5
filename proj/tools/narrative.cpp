// narrative: command-line driver for the narrative index pipeline.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "narrative/pipeline.hpp"

namespace {

using narrative::PipelineConfig;

// Flag spelling for each config key: `half_life_days` -> `--half-life-days`.
std::string flag_for(const std::string& key) {
    std::string f = "--" + key;
    for (auto& ch : f)
        if (ch == '_') ch = '-';
    return f;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Extract causal chains from a dated news corpus and build narrative indices"};
    app.require_subcommand(1);
    app.fallthrough();

    std::optional<std::string> config_path;
    app.add_option("--config", config_path, "Key-value config file");

    std::map<std::string, std::optional<std::string>> overrides;
    for (const auto& key : PipelineConfig::keys()) {
        if (key == "lenient" || key == "include_diagonal") continue;
        std::string name = flag_for(key);
        if (key == "out") name += ",-o";
        app.add_option(name, overrides[key], "Override config key `" + key + "`");
    }
    bool lenient = false;
    bool include_diagonal = false;
    app.add_flag("--lenient", lenient, "Report invalid corpus records as warnings instead of aborting");
    app.add_flag("--include-diagonal", include_diagonal, "Also index same-topic narratives");

    using StageFn = nlohmann::json (*)(const PipelineConfig&);
    const std::pair<const char*, StageFn> stages[] = {
        {"ingest", narrative::run_ingest},   {"classify", narrative::run_classify},
        {"extract", narrative::run_extract}, {"embed", narrative::run_embed},
        {"chain", narrative::run_chain},     {"index", narrative::run_index},
        {"matrix", narrative::run_matrix},   {"graph", narrative::run_graph},
        {"run", narrative::run_pipeline}};
    const std::map<std::string, std::string> help = {
        {"ingest", "Parse and validate the corpus"},
        {"classify", "Train per-topic models and flag paragraphs (or load --flags)"},
        {"extract", "Extract cause/effect pairs with the cue lexicon"},
        {"embed", "Embed cause and effect expressions (or load --external vectors)"},
        {"chain", "Link past effects to later causes above the similarity threshold"},
        {"index", "Compute monthly narrative index series for every topic pair"},
        {"matrix", "Average the series over a period into a topic matrix"},
        {"graph", "Aggregate the matrix by category and export DOT or JSON"},
        {"run", "Run every stage in order and write a report"}};
    std::map<std::string, CLI::App*> subs;
    for (const auto& [name, fn] : stages) subs[name] = app.add_subcommand(name, help.at(name));

    CLI11_PARSE(app, argc, argv);

    try {
        PipelineConfig config;
        if (config_path) config = narrative::load_config(*config_path);
        for (const auto& [key, value] : overrides)
            if (value) config.set(key, *value);
        if (lenient) config.lenient = true;
        if (include_diagonal) config.include_diagonal = true;
        config.validate();

        for (const auto& [name, fn] : stages) {
            if (!subs[name]->parsed()) continue;
            const auto counts = fn(config);
            std::cout << counts.dump(2) << '\n';
        }
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
