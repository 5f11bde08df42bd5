#include "narrative/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <ostream>

#include "narrative/error.hpp"
#include "narrative/jsonl.hpp"

namespace narrative {

namespace {

bool parse_uint(std::string_view s, unsigned& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_int(std::string_view s, int& out) {
    if (s.empty()) return false;
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::optional<Day> parse_day(std::string_view iso) {
    // Strictly YYYY-MM-DD.
    if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0, d = 0;
    if (!parse_int(iso.substr(0, 4), y) || !parse_uint(iso.substr(5, 2), m) ||
        !parse_uint(iso.substr(8, 2), d))
        return std::nullopt;
    const Day day{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!day.ok()) return std::nullopt;
    return day;
}

std::string format_day(const Day& day) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(day.year()),
                  static_cast<unsigned>(day.month()), static_cast<unsigned>(day.day()));
    return buf;
}

int days_between(const Day& earlier, const Day& later) {
    return static_cast<int>((std::chrono::sys_days{later} - std::chrono::sys_days{earlier}).count());
}

MonthKey MonthKey::of(const Day& day) {
    return {static_cast<int>(day.year()), static_cast<unsigned>(day.month())};
}

std::optional<MonthKey> MonthKey::parse(std::string_view text) {
    if (text.size() != 7 || text[4] != '-') return std::nullopt;
    MonthKey key;
    if (!parse_int(text.substr(0, 4), key.year) || !parse_uint(text.substr(5, 2), key.month))
        return std::nullopt;
    if (key.month < 1 || key.month > 12) return std::nullopt;
    return key;
}

MonthKey MonthKey::next() const {
    return month == 12 ? MonthKey{year + 1, 1} : MonthKey{year, month + 1};
}

std::string MonthKey::str() const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u", year, month);
    return buf;
}

std::vector<MonthKey> MonthRange::months() const {
    std::vector<MonthKey> out;
    for (MonthKey m = first; m <= last; m = m.next()) out.push_back(m);
    return out;
}

std::size_t MonthRange::size() const {
    if (last < first) return 0;
    return static_cast<std::size_t>((last.year - first.year) * 12 +
                                    (static_cast<int>(last.month) - static_cast<int>(first.month)) + 1);
}

bool Article::has_topic(std::string_view code) const {
    return std::binary_search(topics.begin(), topics.end(), code);
}

std::vector<Span> split_sentences(std::string_view paragraph, ScriptProfile profile) {
    auto is_terminal = [profile](char32_t c) {
        if (profile == ScriptProfile::spaced) return c == '.' || c == '!' || c == '?';
        return c == U'。' || c == U'！' || c == U'？' || c == '!' || c == '?';
    };
    auto is_closer = [](char32_t c) {
        return c == '"' || c == '\'' || c == ')' || c == ']' || c == U'」' || c == U'』' ||
               c == U'）' || c == U'”' || c == U'’';
    };

    std::vector<Span> out;
    auto emit = [&](std::size_t b, std::size_t e) {
        const auto piece = text::trim_space(paragraph.substr(b, e - b));
        if (piece.empty()) return;
        out.push_back({static_cast<std::size_t>(piece.data() - paragraph.data()), piece.size()});
    };

    std::size_t start = 0;
    std::size_t pos = 0;
    while (pos < paragraph.size()) {
        const auto cp = text::decode_at(paragraph, pos);
        pos += cp.size;
        if (!is_terminal(cp.value)) continue;
        // Absorb runs like "?!" or "..." and trailing closing quotes.
        while (pos < paragraph.size()) {
            const auto nxt = text::decode_at(paragraph, pos);
            if (!is_terminal(nxt.value) && !is_closer(nxt.value)) break;
            pos += nxt.size;
        }
        if (profile == ScriptProfile::spaced && pos < paragraph.size() &&
            !text::is_space(text::decode_at(paragraph, pos).value))
            continue;  // "3.5", "U.S" and similar
        emit(start, pos);
        start = pos;
    }
    emit(start, paragraph.size());
    return out;
}

std::vector<Paragraph> split_paragraphs(const Article& article, ScriptProfile profile) {
    std::vector<Paragraph> out;
    const std::string_view body = article.body;

    auto flush = [&](std::size_t b, std::size_t e) {
        const auto piece = text::trim_space(body.substr(b, e - b));
        if (piece.empty()) return;
        Paragraph p;
        p.article_id = article.id;
        p.ordinal = out.size();
        p.offset = static_cast<std::size_t>(piece.data() - body.data());
        p.text = std::string(piece);
        p.sentences = split_sentences(p.text, profile);
        out.push_back(std::move(p));
    };

    std::size_t para_start = 0;
    std::size_t line_start = 0;
    while (line_start <= body.size()) {
        auto nl = body.find('\n', line_start);
        const std::size_t line_end = nl == std::string_view::npos ? body.size() : nl;
        const bool blank = text::trim_space(body.substr(line_start, line_end - line_start)).empty();
        if (blank) {
            flush(para_start, line_start);
            para_start = line_end;
        }
        if (nl == std::string_view::npos) break;
        line_start = nl + 1;
    }
    flush(para_start, body.size());
    return out;
}

CorpusStore::CorpusStore(std::vector<Article> articles, ScriptProfile profile)
    : articles_(std::move(articles)), profile_(profile) {
    for (auto& a : articles_) {
        std::sort(a.topics.begin(), a.topics.end());
        a.topics.erase(std::unique(a.topics.begin(), a.topics.end()), a.topics.end());
    }
    std::sort(articles_.begin(), articles_.end(), [](const Article& x, const Article& y) {
        if (x.date != y.date) return x.date < y.date;
        return x.id < y.id;
    });
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        if (!index_.emplace(articles_[i].id, i).second)
            throw Error("duplicate article id \"" + articles_[i].id + "\"");
    }
    paragraphs_.reserve(articles_.size());
    for (const auto& a : articles_) paragraphs_.push_back(split_paragraphs(a, profile_));
}

const Article* CorpusStore::find(std::string_view id) const {
    const auto it = index_.find(id);
    return it == index_.end() ? nullptr : &articles_[it->second];
}

const Article& CorpusStore::at(std::string_view id) const {
    const auto* a = find(id);
    if (!a) throw Error("unknown article id \"" + std::string(id) + "\"");
    return *a;
}

std::span<const Paragraph> CorpusStore::paragraphs(std::string_view article_id) const {
    const auto it = index_.find(article_id);
    if (it == index_.end()) return {};
    return paragraphs_[it->second];
}

const Paragraph* CorpusStore::paragraph(const ParagraphKey& key) const {
    const auto ps = paragraphs(key.article_id);
    return key.ordinal < ps.size() ? &ps[key.ordinal] : nullptr;
}

std::vector<const Paragraph*> CorpusStore::all_paragraphs() const {
    std::vector<const Paragraph*> out;
    for (const auto& ps : paragraphs_)
        for (const auto& p : ps) out.push_back(&p);
    return out;
}

std::size_t CorpusStore::paragraph_count() const {
    std::size_t n = 0;
    for (const auto& ps : paragraphs_) n += ps.size();
    return n;
}

std::optional<MonthRange> CorpusStore::span() const {
    if (articles_.empty()) return std::nullopt;
    return MonthRange{MonthKey::of(articles_.front().date), MonthKey::of(articles_.back().date)};
}

bool CorpusStore::operator==(const CorpusStore& other) const {
    if (profile_ != other.profile_ || articles_.size() != other.articles_.size()) return false;
    for (std::size_t i = 0; i < articles_.size(); ++i) {
        const auto& a = articles_[i];
        const auto& b = other.articles_[i];
        if (a.id != b.id || a.date != b.date || a.title != b.title || a.body != b.body ||
            a.topics != b.topics)
            return false;
    }
    return true;
}

namespace {

Article article_from(const jsonl::Json& rec, const std::string& label, std::size_t line) {
    Article a;
    a.id = jsonl::get_string(rec, "id", label, line);
    if (a.id.empty()) throw ParseError(label, line, "empty `id`");
    const auto date = jsonl::get_string(rec, "date", label, line);
    const auto day = parse_day(date);
    if (!day) throw ParseError(label, line, "unparseable date \"" + date + "\"");
    a.date = *day;
    a.title = jsonl::get_string(rec, "title", label, line);
    a.body = jsonl::get_string(rec, "body", label, line);
    for (const auto& t : jsonl::get_array(rec, "topics", label, line)) {
        if (!t.is_string()) throw ParseError(label, line, "`topics` entries must be strings");
        a.topics.push_back(t.get<std::string>());
    }
    return a;
}

}  // namespace

CorpusStore parse_corpus(std::istream& in, const CorpusOptions& options,
                         std::vector<std::string>* warnings, const std::string& label) {
    std::vector<Article> articles;
    std::map<std::string, std::size_t> seen;
    auto reject = [&](const ParseError& e) {
        if (!options.lenient) throw e;
        if (warnings) warnings->push_back(e.what());
    };

    std::string text;
    std::size_t number = 0;
    while (std::getline(in, text)) {
        ++number;
        try {
            const auto rec = jsonl::parse_line(std::move(text), label, number);
            if (!rec) continue;
            Article a = article_from(*rec, label, number);
            if (const auto it = seen.find(a.id); it != seen.end())
                throw ParseError(label, number,
                                 "duplicate id \"" + a.id + "\" (first seen on line " +
                                     std::to_string(it->second) + ")");
            seen.emplace(a.id, number);
            articles.push_back(std::move(a));
        } catch (const ParseError& e) {
            reject(e);
        }
    }
    return CorpusStore(std::move(articles), options.profile);
}

CorpusStore parse_corpus(const std::filesystem::path& path, const CorpusOptions& options,
                         std::vector<std::string>* warnings) {
    auto in = jsonl::open_in(path);
    return parse_corpus(in, options, warnings, path.string());
}

void write_corpus(const CorpusStore& store, std::ostream& out) {
    for (const auto& a : store.articles()) {
        jsonl::Json rec = jsonl::Json::object();
        rec["id"] = a.id;
        rec["date"] = format_day(a.date);
        rec["title"] = a.title;
        rec["body"] = a.body;
        rec["topics"] = a.topics;
        out << jsonl::dump(rec) << '\n';
    }
}

}  // namespace narrative
