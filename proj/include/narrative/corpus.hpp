#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "narrative/text.hpp"

namespace narrative {

using Day = std::chrono::year_month_day;

std::optional<Day> parse_day(std::string_view iso);
std::string format_day(const Day& day);

// Signed calendar-day difference, positive when `later` is after `earlier`.
int days_between(const Day& earlier, const Day& later);

struct MonthKey {
    int year = 0;
    unsigned month = 1;

    static MonthKey of(const Day& day);
    // Parses "YYYY-MM".
    static std::optional<MonthKey> parse(std::string_view text);

    MonthKey next() const;
    std::string str() const;

    auto operator<=>(const MonthKey&) const = default;
};

// Inclusive month range [first, last].
struct MonthRange {
    MonthKey first;
    MonthKey last;

    std::vector<MonthKey> months() const;
    std::size_t size() const;
    bool contains(const MonthKey& m) const { return first <= m && m <= last; }
};

struct Article {
    std::string id;
    Day date{};
    std::string title;
    std::string body;
    std::vector<std::string> topics;  // sorted, unique taxonomy codes

    bool has_topic(std::string_view code) const;
};

// Byte range inside an owning string.
struct Span {
    std::size_t begin = 0;
    std::size_t size = 0;

    std::size_t end() const { return begin + size; }
    std::string_view of(std::string_view s) const { return s.substr(begin, size); }
    bool overlaps(const Span& o) const { return begin < o.end() && o.begin < end(); }

    bool operator==(const Span&) const = default;
};

struct Paragraph {
    std::string article_id;
    std::size_t ordinal = 0;
    std::size_t offset = 0;  // byte offset of `text` inside the article body
    std::string text;
    std::vector<Span> sentences;  // spans inside `text`

    std::string_view sentence(std::size_t i) const { return sentences.at(i).of(text); }
};

struct ParagraphKey {
    std::string article_id;
    std::size_t ordinal = 0;

    auto operator<=>(const ParagraphKey&) const = default;
};

// Splits on blank-line boundaries; each paragraph is further split into
// sentences on the profile's terminal punctuation.
std::vector<Paragraph> split_paragraphs(const Article& article, ScriptProfile profile);
std::vector<Span> split_sentences(std::string_view paragraph, ScriptProfile profile);

// Immutable after construction. Articles are kept sorted by (date, id).
class CorpusStore {
public:
    CorpusStore() = default;
    // Throws Error on a duplicate id.
    CorpusStore(std::vector<Article> articles, ScriptProfile profile);

    std::span<const Article> articles() const { return articles_; }
    std::size_t size() const { return articles_.size(); }
    bool empty() const { return articles_.empty(); }
    ScriptProfile profile() const { return profile_; }

    const Article* find(std::string_view id) const;
    const Article& at(std::string_view id) const;

    std::span<const Paragraph> paragraphs(std::string_view article_id) const;
    const Paragraph* paragraph(const ParagraphKey& key) const;
    // Every paragraph, in article order then ordinal.
    std::vector<const Paragraph*> all_paragraphs() const;
    std::size_t paragraph_count() const;

    // Month span from first to last article; empty corpus has none.
    std::optional<MonthRange> span() const;

    bool operator==(const CorpusStore& other) const;

private:
    std::vector<Article> articles_;
    std::map<std::string, std::size_t, std::less<>> index_;
    std::vector<std::vector<Paragraph>> paragraphs_;
    ScriptProfile profile_ = ScriptProfile::spaced;
};

struct CorpusOptions {
    ScriptProfile profile = ScriptProfile::spaced;
    // Downgrade invalid records to warnings instead of aborting.
    bool lenient = false;
};

CorpusStore parse_corpus(std::istream& in, const CorpusOptions& options,
                         std::vector<std::string>* warnings = nullptr,
                         const std::string& label = "<corpus>");
CorpusStore parse_corpus(const std::filesystem::path& path, const CorpusOptions& options,
                         std::vector<std::string>* warnings = nullptr);

// One record per line in the corpus schema, in store order.
void write_corpus(const CorpusStore& store, std::ostream& out);

}  // namespace narrative
