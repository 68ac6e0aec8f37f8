#include "ireval/bm25.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace ireval {

CollectionStats build_stats(const std::vector<TokenizedText>& docs) {
    if (docs.empty())
        throw std::invalid_argument("build_stats: empty collection");
    CollectionStats stats;
    stats.doc_count = static_cast<std::int64_t>(docs.size());
    std::int64_t total_len = 0;
    std::unordered_set<std::string> seen;
    for (const auto& doc : docs) {
        total_len += static_cast<std::int64_t>(doc.tokens.size());
        seen.clear();
        for (const auto& tok : doc.tokens) {
            if (seen.insert(tok).second)
                ++stats.doc_freq[tok];
        }
    }
    stats.avg_doc_len =
        static_cast<double>(total_len) / static_cast<double>(stats.doc_count);
    return stats;
}

double bm25_idf(const CollectionStats& stats, const std::string& term) {
    std::int64_t df = 0;
    if (auto it = stats.doc_freq.find(term); it != stats.doc_freq.end())
        df = it->second;
    const double n = static_cast<double>(stats.doc_count);
    return std::log(1.0 + (n - static_cast<double>(df) + 0.5) /
                              (static_cast<double>(df) + 0.5));
}

double bm25_score(const TokenizedText& query, const TokenizedText& doc,
                  const CollectionStats& stats, Bm25Params params) {
    if (doc.tokens.empty())
        return 0.0;
    std::unordered_map<std::string, int> tf;
    for (const auto& tok : doc.tokens)
        ++tf[tok];
    const double dl = static_cast<double>(doc.tokens.size());
    const double norm =
        params.k1 * (1.0 - params.b + params.b * dl / stats.avg_doc_len);

    std::unordered_set<std::string> unique_terms(query.tokens.begin(),
                                                 query.tokens.end());
    // Accumulate in a stable order so the result does not depend on hashing.
    std::vector<const std::string*> terms;
    terms.reserve(unique_terms.size());
    for (const auto& t : unique_terms)
        terms.push_back(&t);
    std::sort(terms.begin(), terms.end(),
              [](const std::string* a, const std::string* b) { return *a < *b; });

    double score = 0.0;
    for (const std::string* term : terms) {
        auto it = tf.find(*term);
        if (it == tf.end())
            continue;
        const double f = static_cast<double>(it->second);
        score += bm25_idf(stats, *term) * f * (params.k1 + 1.0) / (f + norm);
    }
    return score;
}

std::vector<TokenizedPassage> tokenize_passages(const std::vector<Passage>& passages) {
    std::vector<TokenizedPassage> out;
    out.reserve(passages.size());
    for (const auto& p : passages)
        out.push_back({p.doc_id, p.passage_index, tokenize(p.text)});
    return out;
}

std::vector<RunEntry> rank_doc_scores(
    const std::string& query_id,
    const std::vector<std::pair<std::string, double>>& doc_scores,
    const std::string& tag) {
    std::vector<std::pair<std::string, double>> ranked(doc_scores);
    std::sort(ranked.begin(), ranked.end(),
              [](const auto& a, const auto& b) {
                  return ranks_before(a.second, a.first, b.second, b.first);
              });
    std::vector<RunEntry> out;
    out.reserve(ranked.size());
    int rank = 1;
    for (const auto& [doc_id, score] : ranked) {
        RunEntry e;
        e.query_id = query_id;
        e.doc_id = doc_id;
        e.rank = rank++;
        e.score = score;
        e.tag = tag;
        out.push_back(std::move(e));
    }
    return out;
}

std::vector<RunEntry> rank_pool(const std::string& query_id,
                                const std::string& query_with_instruction,
                                const std::vector<const TokenizedPassage*>& pool,
                                const CollectionStats& stats,
                                Bm25Params params,
                                const std::string& tag) {
    if (pool.empty())
        throw std::invalid_argument("rank_pool: empty pool for query " + query_id);
    const TokenizedText query = tokenize(query_with_instruction);

    std::unordered_map<std::string, std::vector<double>> per_doc;
    for (const TokenizedPassage* p : pool)
        per_doc[p->doc_id].push_back(bm25_score(query, p->tokens, stats, params));

    std::vector<std::pair<std::string, double>> doc_scores;
    doc_scores.reserve(per_doc.size());
    for (auto& [doc_id, scores] : per_doc)
        doc_scores.emplace_back(doc_id, maxp_aggregate(scores));
    return rank_doc_scores(query_id, doc_scores, tag);
}

}  // namespace ireval
