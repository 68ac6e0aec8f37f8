#ifndef IREVAL_PAIRED_HPP
#define IREVAL_PAIRED_HPP

#include <map>
#include <set>
#include <string>
#include <vector>

#include "ireval/core.hpp"
#include "ireval/metrics.hpp"

namespace ireval {

// Documents relevant under the original instruction whose relevance the
// modified instruction removed (re-judged 0, or dropped from the modified
// judgments of an annotated query).
struct ChangedDocSet {
    std::string query_id;
    std::set<std::string> doc_ids;

    bool operator==(const ChangedDocSet&) const = default;
};

// Changed-relevance documents per query. Only queries judged in both qrels
// are considered; queries with no changed documents are omitted.
std::map<std::string, ChangedDocSet> changed_docs(const Qrels& qrels_og,
                                                  const Qrels& qrels_new);

// Per-query metric plus macro aggregate for one run against one qrels.
// Queries judged relevant but missing from the run score 0; queries without
// relevant judgments are excluded; both cases are reported via `warnings`.
// Throws std::runtime_error when run and qrels share no query, UsageError
// when the metric needs paired or multi-variant input.
MetricReport evaluate_standard(const Run& run, const Qrels& qrels,
                               const MetricSpec& spec,
                               std::vector<std::string>* warnings = nullptr);

struct PairedReport {
    MetricReport standard_metric;  // run_og against qrels_og
    MetricReport p_mrr;            // queries with changed documents only
    std::map<std::string, std::vector<PairedDocDelta>> per_doc;
    std::vector<std::string> warnings;
};

// The pairwise evaluation: the standard metric on the original-instruction
// run, and per changed document the rank movement between the runs. Both
// runs must rank the same candidate set for every query they share, and
// every changed document must appear in both runs; violations are hard
// errors naming the query and the offending documents.
PairedReport paired_evaluate(const Run& run_og, const Run& run_new,
                             const Qrels& qrels_og, const Qrels& qrels_new,
                             const MetricSpec& standard);

}  // namespace ireval

#endif
