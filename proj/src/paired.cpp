#include "ireval/paired.hpp"

#include <sstream>
#include <stdexcept>

#include "ireval/common.hpp"

namespace ireval {

std::map<std::string, ChangedDocSet> changed_docs(const Qrels& qrels_og,
                                                  const Qrels& qrels_new) {
    std::map<std::string, ChangedDocSet> out;
    for (const auto& [qid, docs] : qrels_og.by_query()) {
        if (!qrels_new.has_query(qid))
            continue;  // query never re-judged
        ChangedDocSet set;
        set.query_id = qid;
        for (const auto& [doc_id, grade] : docs) {
            if (grade <= 0)
                continue;
            auto new_grade = qrels_new.grade(qid, doc_id);
            if (!new_grade.has_value() || *new_grade == 0)
                set.doc_ids.insert(doc_id);
        }
        if (!set.doc_ids.empty())
            out.emplace(qid, std::move(set));
    }
    return out;
}

namespace {

double metric_for_query(const MetricSpec& spec,
                        const std::vector<std::string>& ranking,
                        const std::map<std::string, int>& grades) {
    switch (spec.kind) {
        case MetricKind::Map:
            return average_precision(ranking, grades);
        case MetricKind::NdcgAtK:
            return ndcg_at_k(ranking, grades, spec.k);
        case MetricKind::Mrr:
            return reciprocal_rank(ranking, grades);
        default:
            break;
    }
    throw UsageError("metric " + spec.name() +
                     " is not a single-run metric");
}

bool has_relevant(const std::map<std::string, int>& grades) {
    for (const auto& [doc, grade] : grades)
        if (grade > 0) return true;
    return false;
}

std::string join_docs(const std::set<std::string>& docs, std::size_t limit) {
    std::ostringstream out;
    std::size_t n = 0;
    for (const auto& d : docs) {
        if (n) out << ' ';
        if (n == limit) {
            out << "... (" << docs.size() << " total)";
            break;
        }
        out << d;
        ++n;
    }
    return out.str();
}

}  // namespace

MetricReport evaluate_standard(const Run& run, const Qrels& qrels,
                               const MetricSpec& spec,
                               std::vector<std::string>* warnings) {
    if (spec.kind == MetricKind::PMrr || spec.kind == MetricKind::RobustnessAtK)
        throw UsageError("metric " + spec.name() +
                         " is not a single-run metric");
    auto warn = [&](const std::string& message) {
        if (warnings) warnings->push_back(message);
    };

    std::size_t shared = 0;
    std::map<std::string, double> per_query;
    for (const auto& [qid, grades] : qrels.by_query()) {
        const bool in_run = run.has_query(qid);
        if (in_run)
            ++shared;
        if (!has_relevant(grades)) {
            warn("query " + qid + ": no relevant documents, excluded");
            continue;
        }
        if (!in_run) {
            warn("query " + qid + ": missing from run, scored 0");
            per_query.emplace(qid, 0.0);
            continue;
        }
        per_query.emplace(qid, metric_for_query(spec, run.ranking(qid), grades));
    }
    if (shared == 0)
        throw std::runtime_error("run and qrels share no query");
    for (const auto& qid : run.query_order())
        if (!qrels.has_query(qid))
            warn("query " + qid + ": no judgments, ignored");
    if (per_query.empty())
        throw std::runtime_error("no query has relevant judgments");
    return macro_aggregate(spec.name(), spec.k > 0 ? std::optional<int>(spec.k)
                                                   : std::nullopt,
                           std::move(per_query));
}

PairedReport paired_evaluate(const Run& run_og, const Run& run_new,
                             const Qrels& qrels_og, const Qrels& qrels_new,
                             const MetricSpec& standard) {
    // Reranking contract: a query shared by the runs ranks one fixed pool.
    for (const auto& qid : run_og.query_order()) {
        if (!run_new.has_query(qid))
            continue;
        auto docs_og = run_og.doc_set(qid);
        auto docs_new = run_new.doc_set(qid);
        if (docs_og == docs_new)
            continue;
        std::set<std::string> only_og, only_new;
        for (const auto& d : docs_og)
            if (!docs_new.count(d)) only_og.insert(d);
        for (const auto& d : docs_new)
            if (!docs_og.count(d)) only_new.insert(d);
        throw std::runtime_error(
            "query " + qid + ": candidate sets differ between runs; only in "
            "original run: [" + join_docs(only_og, 8) + "], only in modified "
            "run: [" + join_docs(only_new, 8) + "]");
    }

    PairedReport report;
    report.standard_metric =
        evaluate_standard(run_og, qrels_og, standard, &report.warnings);

    const auto changed = changed_docs(qrels_og, qrels_new);
    std::map<std::string, double> per_query;
    for (const auto& [qid, set] : changed) {
        for (const Run* run : {&run_og, &run_new}) {
            if (!run->has_query(qid))
                throw std::runtime_error(
                    "query " + qid +
                    ": has changed-relevance documents but is missing from a run");
        }
        std::vector<PairedDocDelta> deltas;
        deltas.reserve(set.doc_ids.size());
        for (const auto& doc_id : set.doc_ids) {
            auto rank_og = run_og.rank_of(qid, doc_id);
            auto rank_new = run_new.rank_of(qid, doc_id);
            if (!rank_og || !rank_new)
                throw std::runtime_error(
                    "query " + qid + ": changed-relevance document " + doc_id +
                    " is absent from the " +
                    (rank_og ? "modified" : "original") + "-instruction run");
            PairedDocDelta delta;
            delta.doc_id = doc_id;
            delta.rank_og = *rank_og;
            delta.rank_new = *rank_new;
            delta.p_mrr = p_mrr_doc(delta.rank_og, delta.rank_new);
            deltas.push_back(std::move(delta));
        }
        per_query.emplace(qid, p_mrr_query(deltas));
        report.per_doc.emplace(qid, std::move(deltas));
    }
    if (per_query.empty()) {
        report.warnings.push_back(
            "no changed-relevance documents between the qrels; p-MRR is 0 "
            "over an empty query set");
        report.p_mrr.metric_name = "p-mrr";
        report.p_mrr.aggregate = 0.0;
    } else {
        report.p_mrr = macro_aggregate("p-mrr", std::nullopt,
                                       std::move(per_query));
    }
    return report;
}

}  // namespace ireval
