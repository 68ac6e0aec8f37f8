#ifndef IREVAL_METRICS_HPP
#define IREVAL_METRICS_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace ireval {

// Rank movement score for one changed-relevance document. Positive when the
// document was demoted under the modified instruction (rank_new > rank_og).
struct PairedDocDelta {
    std::string doc_id;
    int rank_og = 1;
    int rank_new = 1;
    double p_mrr = 0.0;

    bool operator==(const PairedDocDelta&) const = default;
};

// Per-document paired score:
//   rank_new / rank_og - 1   if rank_og > rank_new   (promoted: negative)
//   1 - rank_og / rank_new   otherwise               (demoted: positive)
// Value in (-1, 1]; 0 exactly when the ranks are equal. Throws on rank < 1.
double p_mrr_doc(int rank_og, int rank_new);

// Mean of per-document scores within one query. Throws on empty input.
double p_mrr_query(const std::vector<PairedDocDelta>& deltas);

// Per-query metric values plus their unweighted mean. Queries always count
// equally, whatever their document or judgment counts.
struct MetricReport {
    std::string metric_name;
    std::optional<int> k;
    std::map<std::string, double> per_query;
    double aggregate = 0.0;
};

MetricReport macro_aggregate(const std::string& metric_name,
                             std::optional<int> k,
                             std::map<std::string, double> per_query);

// Mean over all relevant documents of precision at their rank; a relevant
// document missing from the ranking contributes 0 while still counting in
// the denominator. Throws std::invalid_argument when nothing is relevant.
double average_precision(const std::vector<std::string>& ranking,
                         const std::map<std::string, int>& grades);

// DCG@k with gain grade / log2(rank + 1), normalized by the ideal DCG@k of
// the grades sorted descending. Throws when k < 1 or nothing is relevant.
double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, int>& grades, int k);

// Reciprocal rank of the first grade > 0 document; 0 if none is ranked.
double reciprocal_rank(const std::vector<std::string>& ranking,
                       const std::map<std::string, int>& grades);

// Minimum across a query's per-variant nDCG@k values. Throws on empty input.
double robustness_at_k(const std::vector<double>& variant_scores);

// Metric selector parsed from "map", "ndcg@K", "mrr", "p-mrr",
// "robustness@K" (K a positive integer).
enum class MetricKind { Map, NdcgAtK, Mrr, PMrr, RobustnessAtK };

struct MetricSpec {
    MetricKind kind = MetricKind::Map;
    int k = 0;  // meaningful for NdcgAtK / RobustnessAtK

    std::string name() const;
};

// Throws UsageError on an unrecognized metric string.
MetricSpec parse_metric_spec(const std::string& text);

}  // namespace ireval

#endif
