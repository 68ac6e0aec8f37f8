#include "ireval/reporting.hpp"

#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ireval/common.hpp"
#include "ireval/textproc.hpp"

namespace ireval {

using nlohmann::json;

namespace {

// Fixed-point rendering of round-half-even(value * 10) / 10. nearbyint
// under the default FE_TONEAREST mode implements ties-to-even.
std::string fixed1(double value) {
    double scaled = std::nearbyint(value * 10.0);
    if (scaled == 0.0)
        scaled = 0.0;  // normalize -0
    const long long n = static_cast<long long>(scaled);
    const long long a = n < 0 ? -n : n;
    std::string out = n < 0 ? "-" : "";
    out += std::to_string(a / 10);
    out += '.';
    out += static_cast<char>('0' + a % 10);
    return out;
}

}  // namespace

std::string format_number1(double value) { return fixed1(value); }

std::string format_percent(double value) { return fixed1(value * 100.0); }

namespace {

double mean_or_zero(double sum, std::size_t n) {
    return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

std::size_t word_count(const std::string& text) {
    return tokenize(text).tokens.size();
}

}  // namespace

CorpusStats dataset_stats(const std::vector<QueryRecord>& dataset,
                          const Qrels& qrels_original,
                          const Qrels* qrels_modified) {
    CorpusStats stats;
    double query_words = 0.0, instruction_words = 0.0, relevant = 0.0;
    for (const auto& q : dataset) {
        query_words += static_cast<double>(word_count(q.query_text));
        instruction_words +=
            static_cast<double>(word_count(q.instruction_original));
        relevant +=
            static_cast<double>(qrels_original.relevant_count(q.query_id));
    }
    stats.original.query_count = dataset.size();
    stats.original.mean_query_words = mean_or_zero(query_words, dataset.size());
    stats.original.mean_instruction_words =
        mean_or_zero(instruction_words, dataset.size());
    stats.original.mean_relevant_per_query =
        mean_or_zero(relevant, dataset.size());

    if (qrels_modified) {
        StatsRow row;
        double a_query_words = 0.0, a_instruction_words = 0.0, a_relevant = 0.0;
        for (const auto& q : dataset) {
            if (!qrels_modified->has_query(q.query_id))
                continue;
            ++row.query_count;
            a_query_words += static_cast<double>(word_count(q.query_text));
            a_instruction_words += static_cast<double>(
                word_count(q.instruction_modified.value_or("")));
            a_relevant += static_cast<double>(
                qrels_modified->relevant_count(q.query_id));
        }
        row.mean_query_words = mean_or_zero(a_query_words, row.query_count);
        row.mean_instruction_words =
            mean_or_zero(a_instruction_words, row.query_count);
        row.mean_relevant_per_query = mean_or_zero(a_relevant, row.query_count);
        stats.annotated = row;
    }
    return stats;
}

DeltaReport variant_delta_report(
    const std::map<std::string, MetricReport>& by_variant,
    const std::string& baseline) {
    auto base_it = by_variant.find(baseline);
    if (base_it == by_variant.end())
        throw std::runtime_error("baseline variant '" + baseline +
                                 "' was not evaluated");
    auto keys = [](const MetricReport& r) {
        std::set<std::string> out;
        for (const auto& [qid, value] : r.per_query)
            out.insert(qid);
        return out;
    };
    const auto base_keys = keys(base_it->second);
    for (const auto& [variant, report] : by_variant) {
        if (keys(report) != base_keys)
            throw std::runtime_error(
                "variant '" + variant +
                "' was evaluated on a different query set than the baseline");
    }

    DeltaReport out;
    out.baseline = baseline;
    const double base_score = base_it->second.aggregate;
    out.rows.push_back({baseline, base_score, 0.0});
    for (const auto& [variant, report] : by_variant) {
        if (variant == baseline)
            continue;
        out.rows.push_back(
            {variant, report.aggregate, report.aggregate - base_score});
    }
    return out;
}

std::string render_metric_tsv(const MetricReport& report,
                              bool include_per_query) {
    std::ostringstream out;
    if (include_per_query)
        for (const auto& [qid, value] : report.per_query)
            out << report.metric_name << '\t' << qid << '\t'
                << format_double(value) << '\n';
    out << report.metric_name << '\t' << "all" << '\t'
        << format_double(report.aggregate) << '\n';
    return out.str();
}

namespace {

json metric_to_json(const MetricReport& report) {
    json j;
    j["metric"] = report.metric_name;
    if (report.k)
        j["k"] = *report.k;
    j["aggregate"] = report.aggregate;
    json per = json::object();
    for (const auto& [qid, value] : report.per_query)
        per[qid] = value;
    j["per_query"] = std::move(per);
    return j;
}

json stats_row_to_json(const StatsRow& row) {
    json j;
    j["queries"] = row.query_count;
    j["query_words"] = row.mean_query_words;
    j["instruction_words"] = row.mean_instruction_words;
    j["relevant_docs_per_query"] = row.mean_relevant_per_query;
    return j;
}

}  // namespace

std::string render_metric_json(const MetricReport& report) {
    return metric_to_json(report).dump(2) + "\n";
}

std::string render_stats_tsv(const CorpusStats& stats) {
    std::ostringstream out;
    auto row = [&out](const char* prefix, const StatsRow& r) {
        out << prefix << "queries\t" << r.query_count << '\n'
            << prefix << "query_words\t" << format_number1(r.mean_query_words)
            << '\n'
            << prefix << "instruction_words\t"
            << format_number1(r.mean_instruction_words) << '\n'
            << prefix << "relevant_docs_per_query\t"
            << format_number1(r.mean_relevant_per_query) << '\n';
    };
    row("", stats.original);
    if (stats.annotated)
        row("annotated_", *stats.annotated);
    return out.str();
}

std::string render_stats_json(const CorpusStats& stats) {
    json j;
    j["original"] = stats_row_to_json(stats.original);
    if (stats.annotated)
        j["annotated"] = stats_row_to_json(*stats.annotated);
    return j.dump(2) + "\n";
}

std::string render_delta_tsv(const DeltaReport& report) {
    std::ostringstream out;
    for (const auto& row : report.rows)
        out << row.variant << '\t' << format_percent(row.score) << '\t'
            << format_percent(row.delta) << '\n';
    return out.str();
}

std::string render_delta_json(const DeltaReport& report) {
    json j;
    j["baseline"] = report.baseline;
    json rows = json::array();
    for (const auto& row : report.rows) {
        json r;
        r["variant"] = row.variant;
        r["score"] = row.score;
        r["delta"] = row.delta;
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    return j.dump(2) + "\n";
}

std::string render_paired_tsv(const PairedReport& report,
                              bool include_per_query) {
    std::ostringstream out;
    if (include_per_query) {
        for (const auto& [qid, value] : report.standard_metric.per_query)
            out << report.standard_metric.metric_name << '\t' << qid << '\t'
                << format_double(value) << '\n';
        for (const auto& [qid, deltas] : report.per_doc)
            for (const auto& d : deltas)
                out << "doc-p-mrr\t" << qid << '\t' << d.doc_id << '\t'
                    << d.rank_og << '\t' << d.rank_new << '\t'
                    << format_double(d.p_mrr) << '\n';
        for (const auto& [qid, value] : report.p_mrr.per_query)
            out << "p-mrr\t" << qid << '\t' << format_double(value) << '\n';
    }
    out << report.standard_metric.metric_name << "\tp-mrr\n";
    out << format_percent(report.standard_metric.aggregate) << '\t'
        << format_percent(report.p_mrr.aggregate) << '\n';
    return out.str();
}

std::string render_paired_json(const PairedReport& report) {
    json j;
    j["standard"] = metric_to_json(report.standard_metric);
    j["p_mrr"] = metric_to_json(report.p_mrr);
    json per_doc = json::object();
    for (const auto& [qid, deltas] : report.per_doc) {
        json list = json::array();
        for (const auto& d : deltas) {
            json e;
            e["doc_id"] = d.doc_id;
            e["rank_og"] = d.rank_og;
            e["rank_new"] = d.rank_new;
            e["p_mrr"] = d.p_mrr;
            list.push_back(std::move(e));
        }
        per_doc[qid] = std::move(list);
    }
    j["per_doc"] = std::move(per_doc);
    if (!report.warnings.empty())
        j["warnings"] = report.warnings;
    return j.dump(2) + "\n";
}

std::string render_filter_summary(const FilterSummary& summary) {
    std::ostringstream out;
    out << "input\t" << summary.input << '\n'
        << "after_verdict\t" << summary.after_verdict << '\n'
        << "output\t" << summary.output << '\n'
        << "queries_seen\t" << summary.queries_seen << '\n'
        << "queries_kept\t" << summary.queries_kept << '\n';
    return out.str();
}

}  // namespace ireval
