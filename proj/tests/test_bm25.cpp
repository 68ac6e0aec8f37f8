#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "ireval/bm25.hpp"

using namespace ireval;

namespace {

TokenizedText tt(std::vector<std::string> tokens) {
    return TokenizedText{std::move(tokens)};
}

}  // namespace

TEST_SUITE("bm25") {

TEST_CASE("collection statistics count documents, not occurrences") {
    auto stats = build_stats({tt({"a", "b"}), tt({"a"})});
    CHECK(stats.doc_count == 2);
    CHECK(stats.avg_doc_len == doctest::Approx(1.5));
    CHECK(stats.doc_freq.at("a") == 2);
    CHECK(stats.doc_freq.at("b") == 1);

    // Repeats within one document count once toward df.
    auto rep = build_stats({tt({"a", "a", "a"}), tt({"b"})});
    CHECK(rep.doc_freq.at("a") == 1);

    CHECK_THROWS_AS(build_stats({}), std::invalid_argument);
}

TEST_CASE("idf is the smoothed log ratio") {
    auto stats = build_stats({tt({"x", "x"}), tt({"y", "y"})});
    CHECK(bm25_idf(stats, "x") == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    // Unseen terms take df = 0.
    CHECK(bm25_idf(stats, "z") ==
          doctest::Approx(std::log(1.0 + 2.5 / 0.5)).epsilon(1e-12));
}

TEST_CASE("worked scoring example") {
    // One query term, tf 2, df 1, two documents of average length.
    auto stats = build_stats({tt({"x", "x"}), tt({"y", "y"})});
    const double score = bm25_score(tt({"x"}), tt({"x", "x"}), stats);
    CHECK(score == doctest::Approx(0.95307).epsilon(1e-4));
    // idf = ln 2; tf part = 2*2.2 / (2 + 1.2) = 1.375.
    CHECK(score == doctest::Approx(std::log(2.0) * 1.375).epsilon(1e-12));
}

TEST_CASE("query terms count once no matter how often they repeat") {
    auto stats = build_stats({tt({"x", "x"}), tt({"y", "y"})});
    const auto doc = tt({"x", "x"});
    CHECK(bm25_score(tt({"x", "x", "x"}), doc, stats) ==
          bm25_score(tt({"x"}), doc, stats));
}

TEST_CASE("terms missing from the document contribute nothing") {
    auto stats = build_stats({tt({"x", "x"}), tt({"y", "y"})});
    const auto doc = tt({"x", "x"});
    CHECK(bm25_score(tt({"x", "z", "q"}), doc, stats) ==
          bm25_score(tt({"x"}), doc, stats));
    CHECK(bm25_score(tt({"z"}), doc, stats) == 0.0);
    CHECK(bm25_score(tt({"x"}), tt({}), stats) == 0.0);
}

TEST_CASE("scores are non-negative and grow with term frequency") {
    std::mt19937_64 rng(7);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<TokenizedText> docs;
        const int n_docs = 2 + static_cast<int>(rng() % 6);
        for (int d = 0; d < n_docs; ++d) {
            TokenizedText doc;
            const int len = 1 + static_cast<int>(rng() % 12);
            for (int w = 0; w < len; ++w)
                doc.tokens.push_back(vocab[rng() % vocab.size()]);
            docs.push_back(std::move(doc));
        }
        auto stats = build_stats(docs);
        const auto query = tt({"a", "c"});
        for (const auto& doc : docs)
            CHECK(bm25_score(query, doc, stats) >= 0.0);

        // Appending another query-term occurrence never lowers the score
        // when length normalization is off.
        Bm25Params flat;
        flat.b = 0.0;
        auto grown = docs[0];
        const double before = bm25_score(query, grown, stats, flat);
        grown.tokens.push_back("a");
        CHECK(bm25_score(query, grown, stats, flat) >= before);
    }
}

TEST_CASE("longer documents are penalized at the same tf") {
    auto stats = build_stats({tt({"x", "pad", "pad"}), tt({"y"})});
    const double short_doc = bm25_score(tt({"x"}), tt({"x"}), stats);
    const double long_doc =
        bm25_score(tt({"x"}), tt({"x", "pad", "pad", "pad"}), stats);
    CHECK(short_doc > long_doc);
}

TEST_CASE("rank_doc_scores applies the canonical tie-break") {
    auto entries = rank_doc_scores(
        "q1", {{"dB", 1.0}, {"dC", 2.0}, {"dA", 1.0}}, "sys");
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].doc_id == "dC");
    CHECK(entries[1].doc_id == "dA");  // tie resolved by doc id
    CHECK(entries[2].doc_id == "dB");
    CHECK(entries[0].rank == 1);
    CHECK(entries[2].rank == 3);
    CHECK(entries[0].tag == "sys");
    CHECK(entries[0].query_id == "q1");
}

TEST_CASE("rank_pool aggregates passages with MaxP") {
    // d1 has a weak and a strong passage; d2 one medium passage. The strong
    // passage alone must decide d1's rank.
    std::vector<TokenizedPassage> corpus{
        {"d1", 0, tt({"pad", "pad", "pad", "pad"})},
        {"d1", 1, tt({"x", "x", "pad", "pad"})},
        {"d2", 0, tt({"x", "pad", "pad", "pad"})},
    };
    auto stats = build_stats({corpus[0].tokens, corpus[1].tokens,
                              corpus[2].tokens});
    std::vector<const TokenizedPassage*> pool{&corpus[0], &corpus[1],
                                              &corpus[2]};
    auto entries = rank_pool("q1", "x", pool, stats);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].doc_id == "d1");
    CHECK(entries[1].doc_id == "d2");
    CHECK(entries[0].score > entries[1].score);
    // The doc score equals its best passage score.
    CHECK(entries[0].score ==
          doctest::Approx(bm25_score(tt({"x"}), corpus[1].tokens, stats))
              .epsilon(1e-15));
}

TEST_CASE("rank_pool orders score-less documents by doc id") {
    std::vector<TokenizedPassage> corpus{
        {"dz", 0, tt({"pad"})},
        {"da", 0, tt({"pad"})},
        {"dm", 0, tt({"pad"})},
    };
    auto stats = build_stats({corpus[0].tokens, corpus[1].tokens,
                              corpus[2].tokens});
    std::vector<const TokenizedPassage*> pool{&corpus[0], &corpus[1],
                                              &corpus[2]};
    auto entries = rank_pool("q1", "nothing matches", pool, stats);
    REQUIRE(entries.size() == 3);
    CHECK(entries[0].doc_id == "da");
    CHECK(entries[1].doc_id == "dm");
    CHECK(entries[2].doc_id == "dz");
    for (const auto& e : entries)
        CHECK(e.score == 0.0);
}

TEST_CASE("rank_pool rejects an empty pool") {
    auto stats = build_stats({tt({"x"})});
    CHECK_THROWS_AS(rank_pool("q1", "x", {}, stats), std::invalid_argument);
}

}  // TEST_SUITE
