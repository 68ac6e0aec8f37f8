#ifndef IREVAL_BM25_HPP
#define IREVAL_BM25_HPP

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "ireval/core.hpp"
#include "ireval/textproc.hpp"

namespace ireval {

struct CollectionStats {
    std::int64_t doc_count = 0;
    double avg_doc_len = 0.0;
    std::unordered_map<std::string, std::int64_t> doc_freq;
};

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

// Exact counts over the scoring units (passages, for pooled evaluation).
// Throws on an empty collection.
CollectionStats build_stats(const std::vector<TokenizedText>& docs);

// Smoothed idf: ln(1 + (N - df + 0.5) / (df + 0.5)); non-negative for any
// df in [0, N]. Terms unseen in the collection get df = 0.
double bm25_idf(const CollectionStats& stats, const std::string& term);

// Okapi BM25 over unique query terms:
//   sum_t idf(t) * tf * (k1 + 1) / (tf + k1 * (1 - b + b * dl / avgdl))
// Terms absent from the collection contribute 0.
double bm25_score(const TokenizedText& query, const TokenizedText& doc,
                  const CollectionStats& stats, Bm25Params params = {});

struct TokenizedPassage {
    std::string doc_id;
    int passage_index = 0;
    TokenizedText tokens;
};

std::vector<TokenizedPassage> tokenize_passages(const std::vector<Passage>& passages);

// Scores each pool passage against the query text (query plus whatever
// instruction text the caller joined to it), aggregates passages to document
// scores with MaxP, and returns the documents ranked by descending score with
// doc-id tie-break. Throws on an empty pool.
std::vector<RunEntry> rank_pool(const std::string& query_id,
                                const std::string& query_with_instruction,
                                const std::vector<const TokenizedPassage*>& pool,
                                const CollectionStats& stats,
                                Bm25Params params = {},
                                const std::string& tag = "bm25");

// Ranks document scores with the canonical tie-break and builds a run group.
std::vector<RunEntry> rank_doc_scores(
    const std::string& query_id,
    const std::vector<std::pair<std::string, double>>& doc_scores,
    const std::string& tag);

}  // namespace ireval

#endif
