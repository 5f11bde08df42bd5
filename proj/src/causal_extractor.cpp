#include "narrative/causal_extractor.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <fstream>
#include <ostream>

#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"
#include "narrative/topic_classifier.hpp"

namespace narrative {

std::string_view to_string(Orientation o) {
    return o == Orientation::cause_before_cue ? "CAUSE_BEFORE_CUE" : "EFFECT_BEFORE_CUE";
}

std::optional<Orientation> parse_orientation(std::string_view name) {
    const auto lower = text::ascii_lower(name);
    if (lower == "cause_before_cue") return Orientation::cause_before_cue;
    if (lower == "effect_before_cue") return Orientation::effect_before_cue;
    return std::nullopt;
}

CueLexicon::CueLexicon(std::vector<CueEntry> entries, ScriptProfile profile)
    : entries_(std::move(entries)), profile_(profile) {
    std::set<int> priorities;
    for (const auto& e : entries_) {
        if (text::trim_space(e.pattern).empty()) throw Error("cue pattern must not be empty");
        if (!priorities.insert(e.priority).second)
            throw Error("duplicate cue priority " + std::to_string(e.priority));
    }
    std::sort(entries_.begin(), entries_.end(),
              [](const CueEntry& a, const CueEntry& b) { return a.priority > b.priority; });
    for (const auto& e : entries_) {
        if (profile_ == ScriptProfile::spaced) {
            auto toks = tokenize(e.pattern, ScriptProfile::spaced);
            if (toks.empty()) throw Error("cue pattern \"" + e.pattern + "\" has no word tokens");
            tokens_.push_back(std::move(toks));
        } else {
            tokens_.push_back({std::string(text::trim_space(e.pattern))});
        }
    }
}

CueLexicon CueLexicon::english() {
    using enum Orientation;
    return CueLexicon({{"as a result of", effect_before_cue, 80},
                       {"in response to", effect_before_cue, 70},
                       {"because of", effect_before_cue, 60},
                       {"caused by", effect_before_cue, 50},
                       {"due to", effect_before_cue, 40},
                       {"will cause", cause_before_cue, 30},
                       {"leads to", cause_before_cue, 20},
                       {"because", effect_before_cue, 10}},
                      ScriptProfile::spaced);
}

CueLexicon CueLexicon::japanese() {
    using enum Orientation;
    return CueLexicon({{"が原因で", cause_before_cue, 50},
                       {"の影響で", cause_before_cue, 40},
                       {"を受けて", cause_before_cue, 30},
                       {"による", cause_before_cue, 20},
                       {"ため", cause_before_cue, 10}},
                      ScriptProfile::unspaced);
}

CueLexicon CueLexicon::resolve(const std::string& name, ScriptProfile custom_profile) {
    if (name == "en") return english();
    if (name == "ja") return japanese();
    return load(name, custom_profile);
}

CueLexicon CueLexicon::load(const std::filesystem::path& path, ScriptProfile profile) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open lexicon " + path.string());
    std::vector<CueEntry> entries;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (text::trim_space(line).empty() || text::trim_space(line).front() == '#') continue;
        std::array<std::string, 3> cols;
        std::size_t start = 0;
        for (std::size_t c = 0; c < 3; ++c) {
            const auto tab = line.find('\t', start);
            if ((tab == std::string::npos) != (c == 2))
                throw ParseError(path.string(), number, "expected pattern<TAB>orientation<TAB>priority");
            cols[c] = line.substr(start, tab == std::string::npos ? std::string::npos : tab - start);
            start = tab + 1;
        }
        const auto orientation = parse_orientation(text::trim_space(cols[1]));
        if (!orientation) throw ParseError(path.string(), number, "unknown orientation \"" + cols[1] + "\"");
        int priority = 0;
        const auto pr = text::trim_space(cols[2]);
        const auto [ptr, ec] = std::from_chars(pr.data(), pr.data() + pr.size(), priority);
        if (ec != std::errc{} || ptr != pr.data() + pr.size())
            throw ParseError(path.string(), number, "priority must be an integer");
        entries.push_back({cols[0], *orientation, priority});
    }
    try {
        return CueLexicon(std::move(entries), profile);
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

namespace {

struct WordToken {
    std::string lower;
    Span span;
};

std::vector<WordToken> word_tokens(std::string_view s, Span within) {
    std::vector<WordToken> out;
    std::size_t pos = within.begin;
    std::optional<std::size_t> start;
    auto flush = [&](std::size_t end) {
        if (!start) return;
        out.push_back({text::ascii_lower(s.substr(*start, end - *start)), {*start, end - *start}});
        start.reset();
    };
    while (pos < within.end()) {
        const auto cp = text::decode_at(s, pos);
        if (text::is_word_char(cp.value)) {
            if (!start) start = pos;
        } else {
            flush(pos);
        }
        pos += cp.size;
    }
    flush(within.end());
    return out;
}

constexpr std::array kLeadingSpaced = {"and", "but", "so", "then", "thus", "that", "which", "while", "also"};
constexpr std::array kTrailingSpaced = {"and",    "but",    "so",     "that",   "which", "is",
                                        "was",    "were",   "are",    "been",   "be",    "has",
                                        "have",   "had",    "partly", "largely", "mainly", "mostly"};
constexpr std::array kTrailingUnspaced = {"の", "が", "は"};

template <std::size_t N>
bool in_list(const std::array<const char*, N>& list, std::string_view word) {
    return std::any_of(list.begin(), list.end(), [&](const char* w) { return word == w; });
}

// Strips edge whitespace, punctuation and connective fragments until stable.
Span trim_side(std::string_view s, Span span, ScriptProfile profile) {
    for (;;) {
        const Span before = span;
        while (span.size > 0) {
            const auto cp = text::decode_at(s, span.begin);
            if (!text::is_space(cp.value) && !text::is_punct(cp.value)) break;
            span.begin += cp.size;
            span.size -= std::min(cp.size, span.size);
        }
        while (span.size > 0) {
            std::size_t p = span.end() - 1;
            while (p > span.begin && (static_cast<unsigned char>(s[p]) & 0xC0) == 0x80) --p;
            const auto cp = text::decode_at(s, p);
            if (!text::is_space(cp.value) && !text::is_punct(cp.value)) break;
            span.size = p - span.begin;
        }
        if (span.size == 0) return span;

        if (profile == ScriptProfile::spaced) {
            const auto words = word_tokens(s, span);
            if (words.size() > 1 && in_list(kLeadingSpaced, words.front().lower)) {
                span = {words[1].span.begin, span.end() - words[1].span.begin};
            } else if (words.size() > 1 && in_list(kTrailingSpaced, words.back().lower)) {
                span.size = words[words.size() - 2].span.end() - span.begin;
            }
        } else {
            const auto str = span.of(s);
            for (const char* suffix : kTrailingUnspaced) {
                const std::string_view suf(suffix);
                if (str.size() > suf.size() && str.ends_with(suf)) {
                    span.size -= suf.size();
                    break;
                }
            }
        }
        if (span.begin == before.begin && span.size == before.size) return span;
    }
}

std::optional<Span> find_cue(std::string_view sentence, const std::vector<WordToken>& words,
                             const std::vector<std::string>& pattern, ScriptProfile profile) {
    if (profile == ScriptProfile::unspaced) {
        const auto at = sentence.find(pattern.front());
        if (at == std::string_view::npos) return std::nullopt;
        return Span{at, pattern.front().size()};
    }
    if (pattern.size() > words.size()) return std::nullopt;
    for (std::size_t i = 0; i + pattern.size() <= words.size(); ++i) {
        bool hit = true;
        for (std::size_t k = 0; k < pattern.size() && hit; ++k) hit = words[i + k].lower == pattern[k];
        if (hit) {
            const auto b = words[i].span.begin;
            return Span{b, words[i + pattern.size() - 1].span.end() - b};
        }
    }
    return std::nullopt;
}

std::optional<std::size_t> first_comma(std::string_view s, Span span) {
    for (std::size_t pos = span.begin; pos < span.end();) {
        const auto cp = text::decode_at(s, pos);
        if (cp.value == ',' || cp.value == U'、' || cp.value == U'，') return pos;
        pos += cp.size;
    }
    return std::nullopt;
}

constexpr std::array kClauseConjunctions = {"and", "but", "while", "so", "yet", "although", "whereas"};

// Byte ranges that separate independent clauses inside `span`: a semicolon,
// or a comma followed by a coordinating conjunction.
std::vector<Span> clause_breaks(std::string_view s, Span span, ScriptProfile profile) {
    std::vector<Span> out;
    const auto words = profile == ScriptProfile::spaced ? word_tokens(s, span) : std::vector<WordToken>{};
    for (std::size_t pos = span.begin; pos < span.end();) {
        const auto cp = text::decode_at(s, pos);
        if (cp.value == ';' || cp.value == U'；') {
            out.push_back({pos, cp.size});
        } else if (cp.value == ',' && profile == ScriptProfile::spaced) {
            const auto next = std::find_if(words.begin(), words.end(),
                                           [&](const WordToken& w) { return w.span.begin > pos; });
            if (next != words.end() && in_list(kClauseConjunctions, next->lower))
                out.push_back({pos, next->span.end() - pos});
        }
        pos += cp.size;
    }
    return out;
}

struct Match {
    std::size_t entry;
    Span cue;
};

std::optional<Match> best_match(std::string_view sentence, const CueLexicon& lexicon,
                                const std::vector<std::vector<std::string>>& tokens) {
    const auto words = lexicon.profile() == ScriptProfile::spaced
                           ? word_tokens(sentence, {0, sentence.size()})
                           : std::vector<WordToken>{};
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (auto cue = find_cue(sentence, words, tokens[i], lexicon.profile())) return Match{i, *cue};
    }
    return std::nullopt;
}

}  // namespace

struct CueMatcher {
    static std::optional<Match> match(std::string_view sentence, const CueLexicon& lexicon) {
        if (sentence.empty()) return std::nullopt;
        return best_match(sentence, lexicon, lexicon.tokens_);
    }
};

bool contains_causality(std::string_view sentence, const CueLexicon& lexicon) {
    return CueMatcher::match(sentence, lexicon).has_value();
}

std::optional<Extraction> extract(std::string_view sentence, const CueLexicon& lexicon) {
    const auto m = CueMatcher::match(sentence, lexicon);
    if (!m) return std::nullopt;
    const auto& entry = lexicon.entries()[m->entry];
    const auto profile = lexicon.profile();

    // Only the clauses adjacent to the cue take part in the relation.
    Span left_raw{0, m->cue.begin};
    if (const auto breaks = clause_breaks(sentence, left_raw, profile); !breaks.empty())
        left_raw = {breaks.back().end(), m->cue.begin - breaks.back().end()};
    Span right_raw{m->cue.end(), sentence.size() - m->cue.end()};
    if (const auto breaks = clause_breaks(sentence, right_raw, profile); !breaks.empty())
        right_raw.size = breaks.front().begin - right_raw.begin;

    const Span left = trim_side(sentence, left_raw, profile);
    const Span right = trim_side(sentence, right_raw, profile);

    Extraction ex{entry, {}, m->cue, {}};
    if (left.size > 0 && right.size > 0) {
        const bool cause_left = entry.orientation == Orientation::cause_before_cue;
        ex.cause = cause_left ? left : right;
        ex.effect = cause_left ? right : left;
        return ex;
    }
    // Cue-initial form: "Because of X, Y." The clause right after the cue is
    // the cue's complement, the clause after the comma the other side.
    if (left.size == 0 && right.size > 0 && entry.orientation == Orientation::effect_before_cue) {
        const auto comma = first_comma(sentence, right);
        if (!comma) return std::nullopt;
        const auto after = text::decode_at(sentence, *comma);
        const Span first = trim_side(sentence, {right.begin, *comma - right.begin}, profile);
        const std::size_t rest_begin = *comma + after.size;
        const Span second = trim_side(sentence, {rest_begin, right.end() - rest_begin}, profile);
        if (first.size == 0 || second.size == 0) return std::nullopt;
        ex.cause = first;
        ex.effect = second;
        return ex;
    }
    return std::nullopt;
}

std::vector<CausalPair> extract_pairs(std::string_view sentence, const CueLexicon& lexicon) {
    const auto ex = extract(sentence, lexicon);
    if (!ex) return {};
    CausalPair p;
    p.cause_text = std::string(ex->cause.of(sentence));
    p.effect_text = std::string(ex->effect.of(sentence));
    p.cue = ex->cue.pattern;
    p.cause_span = ex->cause;
    p.cue_span = ex->cue_span;
    p.effect_span = ex->effect;
    return {std::move(p)};
}

ExtractionResult extract_corpus(const CorpusStore& corpus, const TopicFlags& flags, const CueLexicon& lexicon) {
    ExtractionResult result;
    auto& diag = result.diagnostics;
    for (const auto& article : corpus.articles()) {
        for (const auto& para : corpus.paragraphs(article.id)) {
            const auto& topics = flags.topics({article.id, para.ordinal});
            for (std::size_t s = 0; s < para.sentences.size(); ++s) {
                ++diag.sentences;
                const auto sentence = para.sentence(s);
                if (!contains_causality(sentence, lexicon)) continue;
                ++diag.cued_sentences;
                auto pairs = extract_pairs(sentence, lexicon);
                if (pairs.empty()) {
                    ++diag.dropped_no_boundary;
                    continue;
                }
                for (auto& p : pairs) {
                    p.article_id = article.id;
                    p.paragraph = para.ordinal;
                    p.sentence = s;
                    p.date = article.date;
                    p.topics = topics;
                    if (topics.empty()) ++diag.pairs_without_topics;
                    ++diag.pairs;
                    result.pairs.push_back(std::move(p));
                }
            }
        }
    }
    return result;
}

namespace {

jsonl::Json span_json(const Span& s) { return jsonl::Json::array({s.begin, s.size}); }

Span span_from(const jsonl::Json& rec, const char* key, const std::string& label, std::size_t line) {
    const auto& a = jsonl::get_array(rec, key, label, line);
    if (a.size() != 2 || !a[0].is_number_unsigned() || !a[1].is_number_unsigned())
        throw ParseError(label, line, std::string("`") + key + "` must be [begin, size]");
    return {a[0].get<std::size_t>(), a[1].get<std::size_t>()};
}

}  // namespace

std::vector<CausalPair> read_pairs(std::istream& in, const std::string& label) {
    std::vector<CausalPair> pairs;
    jsonl::for_each(in, label, [&](const jsonl::Json& rec, std::size_t line) {
        CausalPair p;
        p.cause_text = jsonl::get_string(rec, "cause", label, line);
        p.effect_text = jsonl::get_string(rec, "effect", label, line);
        if (p.cause_text.empty() || p.effect_text.empty())
            throw ParseError(label, line, "cause and effect must be non-empty");
        p.cue = jsonl::get_string(rec, "cue", label, line);
        p.article_id = jsonl::get_string(rec, "article_id", label, line);
        const auto para = jsonl::get_int(rec, "paragraph", label, line);
        const auto sent = jsonl::get_int(rec, "sentence", label, line);
        if (para < 0 || sent < 0) throw ParseError(label, line, "negative paragraph or sentence index");
        p.paragraph = static_cast<std::size_t>(para);
        p.sentence = static_cast<std::size_t>(sent);
        const auto date = jsonl::get_string(rec, "date", label, line);
        const auto day = parse_day(date);
        if (!day) throw ParseError(label, line, "unparseable date \"" + date + "\"");
        p.date = *day;
        for (const auto& t : jsonl::get_array(rec, "topics", label, line)) {
            if (!t.is_string()) throw ParseError(label, line, "`topics` entries must be strings");
            p.topics.insert(t.get<std::string>());
        }
        p.cause_span = span_from(rec, "cause_span", label, line);
        p.cue_span = span_from(rec, "cue_span", label, line);
        p.effect_span = span_from(rec, "effect_span", label, line);
        pairs.push_back(std::move(p));
    });
    return pairs;
}

std::vector<CausalPair> read_pairs(const std::filesystem::path& path) {
    auto in = jsonl::open_in(path);
    return read_pairs(in, path.string());
}

void write_pairs(const std::vector<CausalPair>& pairs, std::ostream& out) {
    for (const auto& p : pairs) {
        jsonl::Json rec = jsonl::Json::object();
        rec["article_id"] = p.article_id;
        rec["paragraph"] = p.paragraph;
        rec["sentence"] = p.sentence;
        rec["date"] = format_day(p.date);
        rec["cause"] = p.cause_text;
        rec["effect"] = p.effect_text;
        rec["cue"] = p.cue;
        rec["topics"] = p.topics;
        rec["cause_span"] = span_json(p.cause_span);
        rec["cue_span"] = span_json(p.cue_span);
        rec["effect_span"] = span_json(p.effect_span);
        out << jsonl::dump(rec) << '\n';
    }
}

}  // namespace narrative
