#include "ireval/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ireval/common.hpp"

namespace ireval {

double p_mrr_doc(int rank_og, int rank_new) {
    if (rank_og < 1 || rank_new < 1)
        throw std::invalid_argument("p_mrr_doc: ranks must be >= 1");
    const double og = static_cast<double>(rank_og);
    const double nw = static_cast<double>(rank_new);
    if (rank_og > rank_new)
        return nw / og - 1.0;
    return 1.0 - og / nw;
}

double p_mrr_query(const std::vector<PairedDocDelta>& deltas) {
    if (deltas.empty())
        throw std::invalid_argument("p_mrr_query: no changed documents");
    double sum = 0.0;
    for (const auto& d : deltas)
        sum += d.p_mrr;
    return sum / static_cast<double>(deltas.size());
}

MetricReport macro_aggregate(const std::string& metric_name,
                             std::optional<int> k,
                             std::map<std::string, double> per_query) {
    if (per_query.empty())
        throw std::invalid_argument("macro_aggregate: no queries");
    MetricReport report;
    report.metric_name = metric_name;
    report.k = k;
    double sum = 0.0;
    for (const auto& [qid, value] : per_query)
        sum += value;
    report.aggregate = sum / static_cast<double>(per_query.size());
    report.per_query = std::move(per_query);
    return report;
}

namespace {

std::size_t count_relevant(const std::map<std::string, int>& grades) {
    std::size_t n = 0;
    for (const auto& [doc, grade] : grades)
        if (grade > 0) ++n;
    return n;
}

bool is_relevant(const std::map<std::string, int>& grades,
                 const std::string& doc_id) {
    auto it = grades.find(doc_id);
    return it != grades.end() && it->second > 0;
}

}  // namespace

double average_precision(const std::vector<std::string>& ranking,
                         const std::map<std::string, int>& grades) {
    const std::size_t total_relevant = count_relevant(grades);
    if (total_relevant == 0)
        throw std::invalid_argument("average_precision: no relevant documents");
    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < ranking.size(); ++i) {
        if (is_relevant(grades, ranking[i])) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double ndcg_at_k(const std::vector<std::string>& ranking,
                 const std::map<std::string, int>& grades, int k) {
    if (k < 1)
        throw std::invalid_argument("ndcg_at_k: k must be >= 1");
    std::vector<int> all_grades;
    all_grades.reserve(grades.size());
    for (const auto& [doc, grade] : grades)
        if (grade > 0) all_grades.push_back(grade);
    if (all_grades.empty())
        throw std::invalid_argument("ndcg_at_k: no relevant documents");
    std::sort(all_grades.begin(), all_grades.end(), std::greater<int>());

    const std::size_t cutoff = static_cast<std::size_t>(k);
    double dcg = 0.0;
    for (std::size_t i = 0; i < ranking.size() && i < cutoff; ++i) {
        auto it = grades.find(ranking[i]);
        if (it == grades.end() || it->second <= 0)
            continue;
        dcg += static_cast<double>(it->second) /
               std::log2(static_cast<double>(i) + 2.0);
    }
    double idcg = 0.0;
    for (std::size_t i = 0; i < all_grades.size() && i < cutoff; ++i)
        idcg += static_cast<double>(all_grades[i]) /
                std::log2(static_cast<double>(i) + 2.0);
    return dcg / idcg;
}

double reciprocal_rank(const std::vector<std::string>& ranking,
                       const std::map<std::string, int>& grades) {
    for (std::size_t i = 0; i < ranking.size(); ++i)
        if (is_relevant(grades, ranking[i]))
            return 1.0 / static_cast<double>(i + 1);
    return 0.0;
}

double robustness_at_k(const std::vector<double>& variant_scores) {
    if (variant_scores.empty())
        throw std::invalid_argument("robustness_at_k: no variant scores");
    return *std::min_element(variant_scores.begin(), variant_scores.end());
}

std::string MetricSpec::name() const {
    switch (kind) {
        case MetricKind::Map: return "map";
        case MetricKind::NdcgAtK: return "ndcg@" + std::to_string(k);
        case MetricKind::Mrr: return "mrr";
        case MetricKind::PMrr: return "p-mrr";
        case MetricKind::RobustnessAtK: return "robustness@" + std::to_string(k);
    }
    return "map";
}

MetricSpec parse_metric_spec(const std::string& text) {
    MetricSpec spec;
    if (text == "map") {
        spec.kind = MetricKind::Map;
        return spec;
    }
    if (text == "mrr") {
        spec.kind = MetricKind::Mrr;
        return spec;
    }
    if (text == "p-mrr") {
        spec.kind = MetricKind::PMrr;
        return spec;
    }
    auto with_cutoff = [&](std::string_view prefix,
                           MetricKind kind) -> bool {
        if (text.size() <= prefix.size() ||
            text.compare(0, prefix.size(), prefix) != 0)
            return false;
        long long k = 0;
        if (!parse_int(std::string_view(text).substr(prefix.size()), &k) ||
            k < 1 || k > 1000000)
            throw UsageError("bad cutoff in metric: " + text);
        spec.kind = kind;
        spec.k = static_cast<int>(k);
        return true;
    };
    if (with_cutoff("ndcg@", MetricKind::NdcgAtK)) return spec;
    if (with_cutoff("robustness@", MetricKind::RobustnessAtK)) return spec;
    throw UsageError("unknown metric: " + text +
                     " (expected map, ndcg@K, mrr, p-mrr, robustness@K)");
}

}  // namespace ireval
