#ifndef IREVAL_TRAIN_FILTER_HPP
#define IREVAL_TRAIN_FILTER_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ireval/bridge.hpp"

namespace ireval {

// One generated training document awaiting the scorer's verdict.
struct GeneratedCandidate {
    std::string query_id;
    std::string instruction_text;
    std::string doc_text;
    bool label_relevant = false;
    std::optional<double> scorer_prob;  // in [0,1] once scored

    bool operator==(const GeneratedCandidate&) const = default;
};

// One JSON record per line: query_id, instruction_text, doc_text,
// generated_label ("relevant" | "non-relevant"), scorer_prob?.
std::vector<GeneratedCandidate> load_candidates(std::istream& in);
void write_candidates(std::ostream& out,
                      const std::vector<GeneratedCandidate>& candidates);

// Fills scorer_prob through a scoring endpoint. Query text is looked up by
// query_id (empty when absent, for purely instruction-driven scorers).
void score_candidates(std::vector<GeneratedCandidate>& candidates,
                      Scorer& scorer,
                      const std::map<std::string, std::string>& query_text_by_id);

// Keeps a candidate iff the scorer agrees with its generated label:
// (scorer_prob >= threshold) == label_relevant. Throws std::runtime_error
// on a candidate without scorer_prob.
std::vector<GeneratedCandidate> filter_by_verdict(
    const std::vector<GeneratedCandidate>& candidates, double threshold = 0.5);

// Per query keeps the highest-probability relevant candidate and the
// lowest-probability non-relevant one; ties break by doc_text hash
// ascending. Queries missing either side are dropped. Output is ordered by
// query id, relevant before non-relevant.
std::vector<GeneratedCandidate> balance_per_query(
    const std::vector<GeneratedCandidate>& candidates);

struct FilterSummary {
    std::size_t input = 0;
    std::size_t after_verdict = 0;
    std::size_t output = 0;
    std::size_t queries_seen = 0;
    std::size_t queries_kept = 0;
};

FilterSummary summarize_filter(std::size_t input, std::size_t after_verdict,
                               const std::vector<GeneratedCandidate>& input_set,
                               const std::vector<GeneratedCandidate>& output);

}  // namespace ireval

#endif
