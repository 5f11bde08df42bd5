#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "gold.hpp"
#include "narrative/causal_extractor.hpp"
#include "narrative/error.hpp"
#include "narrative/topic_classifier.hpp"
#include "test_util.hpp"

using namespace narrative;

namespace {

const auto kEn = CueLexicon::english();

void check_pair(const std::string& sentence, const std::string& cause, const std::string& effect) {
    const auto pairs = extract_pairs(sentence, kEn);
    REQUIRE(pairs.size() == 1);
    CHECK(pairs[0].cause_text == cause);
    CHECK(pairs[0].effect_text == effect);
}

}  // namespace

TEST_CASE("contains_causality") {
    CHECK(contains_causality("The subprime loan problem will cause a global economic recession", kEn));
    CHECK_FALSE(contains_causality("Stocks rose yesterday", kEn));
    CHECK_FALSE(contains_causality("", kEn));
    // Whole tokens only, case-insensitive.
    CHECK_FALSE(contains_causality("Overdue tomorrow", kEn));
    CHECK(contains_causality("DUE TO rain", kEn));
}

TEST_CASE("extract_pairs on the worked sentences") {
    check_pair("The subprime loan problem will cause a global economic recession", "The subprime loan problem",
               "a global economic recession");
    check_pair("Companies have increased their green energy investments in response to future strict "
               "environmental regulations introduced by the authorities",
               "future strict environmental regulations introduced by the authorities",
               "Companies have increased their green energy investments");
    CHECK(extract_pairs("Stocks rose yesterday", kEn).empty());
}

TEST_CASE("the highest-priority cue wins") {
    // "because of" outranks "because"; "as a result of" outranks "due to".
    check_pair("Sales fell because of weak demand", "weak demand", "Sales fell");
    const auto p = extract_pairs("Output dropped as a result of outages due to storms", kEn);
    REQUIRE(p.size() == 1);
    CHECK(p[0].cue == "as a result of");
    CHECK(p[0].cause_text == "outages due to storms");
}

TEST_CASE("cue-initial sentences split at the first comma") {
    check_pair("Due to rising sea levels, coastal property values have declined.", "rising sea levels",
               "coastal property values have declined");
    CHECK(extract_pairs("Because of the storm.", kEn).empty());
    CHECK(extract_pairs("Leads to nothing, really.", kEn).empty());
}

TEST_CASE("no clean clause boundary yields nothing") {
    CHECK(extract_pairs("Because.", kEn).empty());
    CHECK(extract_pairs("It was due to", kEn).empty());
    CHECK(contains_causality("It was due to", kEn));
}

TEST_CASE("extraction invariants over the gold fixture and perturbations") {
    std::vector<std::string> sentences;
    for (const auto& g : narrative::testing::load_gold()) sentences.push_back(g.sentence);
    sentences.push_back("Because of, well, reasons, things happened; and then more because of it.");
    sentences.push_back("due to due to due to");

    std::vector<CueEntry> entries = kEn.entries();
    std::mt19937_64 rng(5);
    for (const auto& s : sentences) {
        const auto pairs = extract_pairs(s, kEn);
        const auto ex = extract(s, kEn);
        if (!pairs.empty()) CHECK(contains_causality(s, kEn));
        if (!contains_causality(s, kEn)) CHECK(pairs.empty());
        if (ex) {
            CHECK(ex->cause.size > 0);
            CHECK(ex->effect.size > 0);
            CHECK(ex->cause.end() <= s.size());
            CHECK(ex->effect.end() <= s.size());
            CHECK_FALSE(ex->cause.overlaps(ex->effect));
            CHECK_FALSE(ex->cause.overlaps(ex->cue_span));
            CHECK_FALSE(ex->effect.overlaps(ex->cue_span));
        }
        // Entry order never matters once priorities are fixed.
        for (int k = 0; k < 5; ++k) {
            for (std::size_t i = entries.size(); i > 1; --i) std::swap(entries[i - 1], entries[rng() % i]);
            const CueLexicon shuffled(entries, ScriptProfile::spaced);
            CHECK(extract_pairs(s, shuffled) == pairs);
        }
    }
}

TEST_CASE("gold fixture accuracy") {
    const auto gold = narrative::testing::load_gold();
    REQUIRE(gold.size() == 30);
    std::size_t cued = 0, exact = 0;
    for (const auto& g : gold) {
        const auto pairs = extract_pairs(g.sentence, kEn);
        if (g.cause.empty()) {
            CHECK_MESSAGE(pairs.empty(), g.sentence);
            continue;
        }
        ++cued;
        if (pairs.size() == 1 && pairs[0].cause_text == g.cause && pairs[0].effect_text == g.effect) ++exact;
        else MESSAGE("mismatch: ", g.sentence);
    }
    CHECK(cued == 20);
    CHECK(static_cast<double>(exact) / static_cast<double>(cued) >= 0.95);
}

TEST_CASE("japanese lexicon") {
    const auto ja = CueLexicon::japanese();
    const auto p = extract_pairs("円高のため輸出が減少した。", ja);
    REQUIRE(p.size() == 1);
    CHECK(p[0].cause_text == "円高");
    CHECK(p[0].effect_text == "輸出が減少した");

    const auto q = extract_pairs("環境規制の強化を受けて、企業は再生可能エネルギーへの投資を増やした。", ja);
    REQUIRE(q.size() == 1);
    CHECK(q[0].cause_text == "環境規制の強化");
    CHECK(q[0].effect_text == "企業は再生可能エネルギーへの投資を増やした");

    const auto r = extract_pairs("大雨が原因で工場が停止した", ja);
    REQUIRE(r.size() == 1);
    CHECK(r[0].cue == "が原因で");
    CHECK(r[0].cause_text == "大雨");

    CHECK_FALSE(contains_causality("株価が上昇した。", ja));
}

TEST_CASE("lexicon construction and files") {
    CHECK_THROWS_AS(CueLexicon({{"a", Orientation::cause_before_cue, 1}, {"b", Orientation::cause_before_cue, 1}},
                               ScriptProfile::spaced),
                    Error);
    CHECK_THROWS_AS(CueLexicon({{"  ", Orientation::cause_before_cue, 1}}, ScriptProfile::spaced), Error);

    narrative::testing::TempDir dir("lex");
    narrative::testing::write_text(dir / "lex.tsv", "# custom\nowing to\tEFFECT_BEFORE_CUE\t5\nresults in\tcause_before_cue\t3\n");
    const auto lex = CueLexicon::load(dir / "lex.tsv", ScriptProfile::spaced);
    REQUIRE(lex.entries().size() == 2);
    CHECK(lex.entries()[0].pattern == "owing to");
    const auto p = extract_pairs("Flights were cancelled owing to fog", lex);
    REQUIRE(p.size() == 1);
    CHECK(p[0].cause_text == "fog");
    CHECK(p[0].effect_text == "Flights were cancelled");

    narrative::testing::write_text(dir / "bad.tsv", "owing to\tSIDEWAYS\t5\n");
    CHECK_THROWS_WITH_AS(CueLexicon::load(dir / "bad.tsv", ScriptProfile::spaced), doctest::Contains(":1:"),
                         ParseError);
    CHECK_THROWS_AS(CueLexicon::resolve("/no/such/lexicon.tsv", ScriptProfile::spaced), Error);

    // The shipped lexicon files match the built-in lexicons.
    const auto en_file = CueLexicon::load(narrative::testing::source_path("data/lexicons/en.tsv"), ScriptProfile::spaced);
    const auto ja_file = CueLexicon::load(narrative::testing::source_path("data/lexicons/ja.tsv"), ScriptProfile::unspaced);
    auto same = [](const CueLexicon& a, const CueLexicon& b) {
        if (a.entries().size() != b.entries().size()) return false;
        for (std::size_t i = 0; i < a.entries().size(); ++i) {
            const auto &x = a.entries()[i], &y = b.entries()[i];
            if (x.pattern != y.pattern || x.orientation != y.orientation || x.priority != y.priority) return false;
        }
        return true;
    };
    CHECK(same(en_file, CueLexicon::english()));
    CHECK(same(ja_file, CueLexicon::japanese()));
}

TEST_CASE("extract_corpus attaches location, date and topics") {
    using narrative::testing::article;
    const CorpusStore corpus({article("n1", "2021-05-03",
                                      "Markets were calm. Crop yields fell due to the prolonged drought.\n\n"
                                      "Because.\n\nNothing here.")},
                             ScriptProfile::spaced);
    TopicFlags flags;
    flags.set({"n1", 0}, {"AGRI"});
    const auto result = extract_corpus(corpus, flags, kEn);
    REQUIRE(result.pairs.size() == 1);
    const auto& p = result.pairs[0];
    CHECK(p.article_id == "n1");
    CHECK(p.paragraph == 0);
    CHECK(p.sentence == 1);
    CHECK(p.date == narrative::testing::day("2021-05-03"));
    CHECK(p.topics == std::set<std::string>{"AGRI"});
    CHECK(result.diagnostics.sentences == 4);
    CHECK(result.diagnostics.cued_sentences == 2);
    CHECK(result.diagnostics.dropped_no_boundary == 1);
    CHECK(result.diagnostics.pairs_without_topics == 0);

    std::ostringstream out;
    write_pairs(result.pairs, out);
    std::istringstream in(out.str());
    CHECK(read_pairs(in) == result.pairs);
}
