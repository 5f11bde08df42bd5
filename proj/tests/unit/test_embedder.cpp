#include <doctest.h>

#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "narrative/embedder.hpp"
#include "narrative/error.hpp"

using namespace narrative;

TEST_CASE("tokenize") {
    CHECK(tokenize("Green Energy investment", ScriptProfile::spaced) ==
          std::vector<std::string>{"green", "energy", "investment"});
    CHECK(tokenize("環境規制", ScriptProfile::unspaced) == std::vector<std::string>{"環境", "境規", "規制"});
    CHECK(tokenize("", ScriptProfile::spaced).empty());
    CHECK(tokenize("", ScriptProfile::unspaced).empty());
    CHECK(tokenize("rates, (again)!", ScriptProfile::spaced) == std::vector<std::string>{"rates", "again"});
    // Punctuation breaks bigram runs; a lone character stands alone.
    CHECK(tokenize("円、高値", ScriptProfile::unspaced) == std::vector<std::string>{"円", "高値"});
}

TEST_CASE("embed is deterministic, normalized, zero for empty text") {
    const auto a = embed("strict environmental regulations", ScriptProfile::spaced);
    CHECK(a == embed("strict environmental regulations", ScriptProfile::spaced));
    CHECK(a.dimension() == kDefaultEmbeddingDim);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-12));
    const auto z = embed("", ScriptProfile::spaced);
    CHECK(z.entries().empty());
    CHECK(cosine(z, a) == 0.0);
    CHECK(cosine(z, z) == 0.0);
    CHECK_THROWS_AS(embed("x", ScriptProfile::spaced, 1), Error);
}

TEST_CASE("repeated tokens are log-scaled") {
    const auto v = embed("carbon carbon tax", ScriptProfile::spaced, 1u << 20);
    REQUIRE(v.entries().size() == 2);
    const double w2 = 1.0 + std::log(2.0);
    const double norm = std::sqrt(w2 * w2 + 1.0);
    std::set<double> values;
    for (const auto& [i, x] : v.entries()) values.insert(x);
    CHECK(values.count(1.0 / norm) == 1);
    CHECK(std::abs(*values.rbegin() - w2 / norm) < 1e-15);
}

TEST_CASE("disjoint expressions have cosine 0 when the vocabulary is collision-free") {
    const std::vector<std::pair<std::string, std::string>> fixture = {
        {"the subprime loan problem", "a global economic recession"},
        {"future strict environmental regulations", "companies increased green energy investments"},
        {"heavy flooding in the river basin", "insurers raised premiums sharply"},
        {"carbon tax introduction", "utility stocks fell"},
    };
    // Brute-force collision check over the whole fixture vocabulary.
    std::set<std::string> vocab;
    for (const auto& [x, y] : fixture) {
        for (const auto& t : tokenize(x, ScriptProfile::spaced)) vocab.insert(t);
        for (const auto& t : tokenize(y, ScriptProfile::spaced)) vocab.insert(t);
    }
    std::set<std::uint64_t> buckets;
    for (const auto& t : vocab) buckets.insert(text::fnv1a(t) % kDefaultEmbeddingDim);
    REQUIRE(buckets.size() == vocab.size());

    for (const auto& [x, y] : fixture)
        CHECK(cosine(embed(x, ScriptProfile::spaced), embed(y, ScriptProfile::spaced)) == 0.0);
}

TEST_CASE("cosine examples and properties") {
    const auto e1 = Vector::dense({1.0, 0.0});
    const auto e2 = Vector::dense({0.0, 1.0});
    const auto d = Vector::dense({1.0, 1.0});
    CHECK(cosine(e1, e1) == 1.0);
    CHECK(cosine(e1, e2) == 0.0);
    CHECK(cosine(d, e1) == doctest::Approx(0.70710678).epsilon(1e-9));
    CHECK(std::abs(cosine(d, e1) - 1.0 / std::sqrt(2.0)) < 1e-9);
    CHECK_THROWS_AS(cosine(e1, Vector::dense({1.0, 0.0, 0.0})), Error);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> a(8), b(8);
        for (auto& x : a) x = g(rng);
        for (auto& x : b) x = g(rng);
        const auto u = Vector::dense(a);
        const auto v = Vector::dense(b);
        const double c = std::exp(g(rng) * 3.0);
        CHECK(cosine(u, v) == cosine(v, u));
        CHECK(std::abs(cosine(u, v)) <= 1.0 + 1e-12);
        CHECK(cosine(u, u.scaled(c)) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(cosine(u.scaled(c), v) == doctest::Approx(cosine(u, v)).epsilon(1e-12));
    }
}

TEST_CASE("Vector::sparse validates entries") {
    CHECK_THROWS_AS(Vector::sparse(4, {{5, 1.0}}), Error);
    CHECK_THROWS_AS(Vector::sparse(4, {{2, 1.0}, {1, 1.0}}), Error);
    CHECK_THROWS_AS(Vector::sparse(4, {{1, NAN}}), Error);
    CHECK(Vector::sparse(4, {{1, 0.0}, {2, 3.0}}).entries().size() == 1);
}

TEST_CASE("external embeddings") {
    const ExpressionKey k1{"a1", 0, 0, Role::cause};
    const ExpressionKey k2{"a1", 0, 0, Role::effect};
    const std::set<ExpressionKey> known{k1, k2};

    SUBCASE("two records of dimension 4") {
        std::istringstream in(
            R"({"article_id":"a1","paragraph":0,"sentence":0,"role":"cause","vector":[1,0,0,0]})"
            "\n"
            R"({"article_id":"a1","paragraph":0,"sentence":0,"role":"effect","vector":[0,0.5,0,0.5]})");
        const auto t = load_embeddings(in, &known);
        CHECK(t.size() == 2);
        CHECK(t.dimension() == 4u);
        CHECK(t.at(k2).to_dense() == std::vector<double>{0, 0.5, 0, 0.5});
    }
    SUBCASE("ragged dimension") {
        std::istringstream in(
            R"({"article_id":"a1","paragraph":0,"sentence":0,"role":"cause","vector":[1,0,0,0]})"
            "\n"
            R"({"article_id":"a1","paragraph":0,"sentence":0,"role":"effect","vector":[1,0,0]})");
        CHECK_THROWS_WITH_AS(load_embeddings(in, &known), doctest::Contains(":2:"), ParseError);
    }
    SUBCASE("unknown key") {
        std::istringstream in(R"({"article_id":"zz","paragraph":3,"sentence":1,"role":"cause","vector":[1,0]})");
        CHECK_THROWS_WITH_AS(load_embeddings(in, &known), doctest::Contains("zz/3/1/cause"), ParseError);
    }
    SUBCASE("write/read preserves every vector exactly") {
        EmbeddingTable t;
        t.insert(k1, embed("carbon tax introduction", ScriptProfile::spaced, 1u << 20));
        t.insert(k2, embed("utility stocks fell", ScriptProfile::spaced, 1u << 20));
        std::ostringstream out;
        write_embeddings(t, out);
        std::istringstream in(out.str());
        const auto back = load_embeddings(in, &known);
        CHECK(back.items() == t.items());

        EmbeddingTable dense;
        dense.insert(k1, Vector::dense({0.1, 0.2, 0.3}));
        std::ostringstream out2;
        write_embeddings(dense, out2);
        CHECK(out2.str().find("\"vector\"") != std::string::npos);
        std::istringstream in2(out2.str());
        CHECK(load_embeddings(in2).items() == dense.items());
    }
}
