#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "narrative/corpus.hpp"
#include "narrative/embedder.hpp"
#include "narrative/text.hpp"

namespace narrative {

class TopicFlags;

// Which side of the cue holds the cause. "X will cause Y" is cause-before-cue;
// "Y because of X" is effect-before-cue.
enum class Orientation { cause_before_cue, effect_before_cue };

std::string_view to_string(Orientation o);
std::optional<Orientation> parse_orientation(std::string_view name);

struct CueEntry {
    std::string pattern;
    Orientation orientation = Orientation::cause_before_cue;
    int priority = 0;  // higher wins
};

class CueLexicon {
public:
    // Throws Error on an empty pattern or a repeated priority.
    CueLexicon(std::vector<CueEntry> entries, ScriptProfile profile);

    static CueLexicon english();
    static CueLexicon japanese();
    // `name` is "en", "ja" or a path to a lexicon file.
    static CueLexicon resolve(const std::string& name, ScriptProfile custom_profile);
    // One cue per line: pattern<TAB>orientation<TAB>priority.
    static CueLexicon load(const std::filesystem::path& path, ScriptProfile profile);

    // Sorted by descending priority.
    const std::vector<CueEntry>& entries() const { return entries_; }
    ScriptProfile profile() const { return profile_; }
    bool empty() const { return entries_.empty(); }

private:
    std::vector<CueEntry> entries_;
    std::vector<std::vector<std::string>> tokens_;  // spaced patterns, lowercased
    ScriptProfile profile_;

    friend struct CueMatcher;
};

// Cause/effect/cue byte ranges inside one sentence.
struct Extraction {
    CueEntry cue;
    Span cause;
    Span cue_span;
    Span effect;
};

struct CausalPair {
    std::string cause_text;
    std::string effect_text;
    std::string cue;
    std::string article_id;
    std::size_t paragraph = 0;
    std::size_t sentence = 0;
    Day date{};
    std::set<std::string> topics;
    Span cause_span;
    Span cue_span;
    Span effect_span;

    ExpressionKey key(Role role) const { return {article_id, paragraph, sentence, role}; }
    ParagraphKey paragraph_key() const { return {article_id, paragraph}; }
    bool operator==(const CausalPair&) const = default;
};

// True iff some cue matches as a whole-token subsequence (spaced scripts,
// case-insensitive) or as an exact substring (unspaced scripts).
bool contains_causality(std::string_view sentence, const CueLexicon& lexicon);

// The highest-priority matching cue, split into cause and effect spans.
// nullopt when no cue matches or no clean clause boundary exists.
std::optional<Extraction> extract(std::string_view sentence, const CueLexicon& lexicon);

// At most one pair per sentence; location fields are left default.
std::vector<CausalPair> extract_pairs(std::string_view sentence, const CueLexicon& lexicon);

struct ExtractionDiagnostics {
    std::size_t sentences = 0;
    std::size_t cued_sentences = 0;
    std::size_t pairs = 0;
    // Cue matched but no clean clause boundary; no pair emitted.
    std::size_t dropped_no_boundary = 0;
    // Pairs whose paragraph carries no topic flag.
    std::size_t pairs_without_topics = 0;
};

struct ExtractionResult {
    std::vector<CausalPair> pairs;
    ExtractionDiagnostics diagnostics;
};

// Runs over every sentence of every paragraph, attaching location, article
// date and the paragraph's topic flags.
ExtractionResult extract_corpus(const CorpusStore& corpus, const TopicFlags& flags, const CueLexicon& lexicon);

std::vector<CausalPair> read_pairs(std::istream& in, const std::string& label = "<pairs>");
std::vector<CausalPair> read_pairs(const std::filesystem::path& path);
void write_pairs(const std::vector<CausalPair>& pairs, std::ostream& out);

}  // namespace narrative
