#ifndef IREVAL_REPORTING_HPP
#define IREVAL_REPORTING_HPP

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ireval/core.hpp"
#include "ireval/metrics.hpp"
#include "ireval/paired.hpp"
#include "ireval/train_filter.hpp"

namespace ireval {

// One decimal place, ties rounded half-even ("banker's"), no exponent.
std::string format_number1(double value);

// Metric-in-[0,1] presentation as points: value * 100 at one decimal.
std::string format_percent(double value);

struct StatsRow {
    std::size_t query_count = 0;
    double mean_query_words = 0.0;
    double mean_instruction_words = 0.0;
    double mean_relevant_per_query = 0.0;
};

struct CorpusStats {
    StatsRow original;
    // Present when modified qrels are supplied: the re-annotated subset,
    // measured with the modified instructions and judgments.
    std::optional<StatsRow> annotated;
};

// Word counts use the scoring tokenizer so "word" means one thing here.
// Queries absent from the qrels count zero relevant documents.
CorpusStats dataset_stats(const std::vector<QueryRecord>& dataset,
                          const Qrels& qrels_original,
                          const Qrels* qrels_modified = nullptr);

struct VariantDelta {
    std::string variant;
    double score = 0.0;
    double delta = 0.0;  // score - baseline score, before any rounding
};

struct DeltaReport {
    std::string baseline;
    std::vector<VariantDelta> rows;  // baseline first, then by variant name
};

// Per-variant aggregate scores against one baseline variant. Every report
// must cover the same query set; throws std::runtime_error otherwise.
DeltaReport variant_delta_report(
    const std::map<std::string, MetricReport>& by_variant,
    const std::string& baseline);

// Tab-separated renderings. Values carry full precision (shortest
// round-trip form) except where noted.
std::string render_metric_tsv(const MetricReport& report,
                              bool include_per_query);
std::string render_metric_json(const MetricReport& report);

std::string render_stats_tsv(const CorpusStats& stats);
std::string render_stats_json(const CorpusStats& stats);

// Rows of (variant, score, delta) in points at one decimal.
std::string render_delta_tsv(const DeltaReport& report);
std::string render_delta_json(const DeltaReport& report);

// The paired-evaluation table row: standard metric and p-MRR in points at
// one decimal, optionally preceded by per-query and per-document detail.
std::string render_paired_tsv(const PairedReport& report,
                              bool include_per_query);
std::string render_paired_json(const PairedReport& report);

std::string render_filter_summary(const FilterSummary& summary);

}  // namespace ireval

#endif
