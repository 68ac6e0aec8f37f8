#ifndef IREVAL_FIXTURES_HPP
#define IREVAL_FIXTURES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ireval/core.hpp"
#include "ireval/textproc.hpp"
#include "ireval/train_filter.hpp"

namespace ireval {

// Desk-scale synthetic corpus knobs. Everything downstream of the seed is
// deterministic and platform-independent.
struct FixtureOptions {
    std::uint64_t seed = 7;
    int queries = 20;
    int docs_per_query = 50;
    int relevant_per_query = 5;
    int changed_per_query = 2;    // lose relevance under the modified narrative
    int judged_nonrelevant = 10;  // explicit grade-0 judgments per query
    int variant_count = 3;        // named instruction paraphrases
    int candidates_per_query = 4;
    int min_doc_words = 30;
    int max_doc_words = 80;
};

struct FixtureSet {
    std::vector<QueryRecord> dataset;
    std::vector<Document> documents;
    Qrels qrels_original;
    Qrels qrels_modified;          // every other query is re-annotated
    std::vector<Run> contributing_runs;  // two pooling contributors
    std::vector<GeneratedCandidate> candidates;  // scorer_prob prefilled
};

// Validates option ranges (UsageError) and generates a coherent family:
// relevant documents share vocabulary with their query and instruction,
// changed documents are re-judged 0, paraphrase variants reshuffle the
// instruction, and training candidates carry randomized verdicts.
FixtureSet generate_fixtures(const FixtureOptions& options);

}  // namespace ireval

#endif
