#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ireval/bm25.hpp"
#include "ireval/bridge.hpp"
#include "ireval/common.hpp"
#include "ireval/core.hpp"
#include "ireval/fixtures.hpp"
#include "ireval/metrics.hpp"
#include "ireval/paired.hpp"
#include "ireval/pooling.hpp"
#include "ireval/reporting.hpp"
#include "ireval/textproc.hpp"
#include "ireval/train_filter.hpp"

namespace {

using namespace ireval;

struct Global {
    int threads = 0;  // 0 = hardware concurrency
    std::uint64_t seed = 7;
    bool quiet = false;

    int effective_threads() const {
        if (threads > 0)
            return threads;
        const unsigned hw = std::thread::hardware_concurrency();
        return hw == 0 ? 1 : static_cast<int>(hw);
    }
};

void emit_warnings(const std::vector<std::string>& warnings, bool quiet) {
    if (quiet)
        return;
    for (const auto& w : warnings)
        std::cerr << "warning: " << w << '\n';
}

// Data files that fail to open are flag-level mistakes (exit 1); files that
// open but do not parse are data errors (exit 2).
std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open " + path);
    return in;
}

template <class Fn>
auto load_file(const std::string& path, Fn parse) {
    std::ifstream in = open_input(path);
    try {
        return parse(in);
    } catch (const ParseError& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
}

void write_output(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        if (!std::cout)
            throw std::runtime_error("writing to standard output failed");
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot open " + path + " for writing");
    out << content;
    out.close();
    if (!out)
        throw std::runtime_error("writing " + path + " failed");
}

Run load_run(const std::string& path, bool quiet) {
    auto parsed = load_file(path, [](std::istream& in) { return parse_run(in); });
    if (!quiet)
        for (const auto& w : parsed.warnings)
            std::cerr << "warning: " << path << ": " << w << '\n';
    return std::move(parsed.run);
}

Qrels load_qrels_file(const std::string& path) {
    return load_file(path, [](std::istream& in) { return parse_qrels(in); });
}

std::vector<QueryRecord> load_dataset_file(const std::string& path) {
    return load_file(path, [](std::istream& in) { return load_dataset(in); });
}

std::string run_to_string(const Run& run) {
    std::ostringstream out;
    write_run(out, run);
    return out.str();
}

// --- shared reranking driver -----------------------------------------------

struct RerankArgs {
    std::string dataset_path;
    std::string passages_path;
    std::string pools_path;
    std::string out_path = "-";
    std::string variant = "original";
    bool no_instruction = false;
    std::string restrict_qrels_path;
    std::string tag;
    // scorer selection
    bool use_bm25 = false;
    double k1 = 1.2;
    double b = 0.75;
    std::string scorer_cmd;
    std::string replay_path;
    std::string save_replay_path;
    double timeout = 60.0;
};

void add_rerank_io(CLI::App* cmd, RerankArgs& args) {
    cmd->add_option("--dataset", args.dataset_path,
                    "query records, one JSON object per line")
        ->required();
    cmd->add_option("--passages", args.passages_path,
                    "chunked corpus from `chunk`")
        ->required();
    cmd->add_option("--pools", args.pools_path, "candidate pools from `pool`")
        ->required();
    cmd->add_option("--out", args.out_path, "output run file, - for stdout");
    cmd->add_option("--variant", args.variant,
                    "instruction variant: original, modified, none, or a "
                    "named paraphrase");
    cmd->add_flag("--no-instruction", args.no_instruction,
                  "score with the bare query (same as --variant none)");
    cmd->add_option("--restrict-to-qrels", args.restrict_qrels_path,
                    "only rerank queries judged in this qrels file");
}

int do_rerank(const Global& global, const RerankArgs& args,
              const std::string& default_tag) {
    const auto dataset = load_dataset_file(args.dataset_path);
    const auto passages = load_file(args.passages_path, [](std::istream& in) {
        return load_passages(in);
    });
    auto pools = load_file(args.pools_path, [](std::istream& in) {
        return parse_pools(in);
    });
    if (!args.restrict_qrels_path.empty()) {
        const Qrels keep = load_qrels_file(args.restrict_qrels_path);
        for (auto it = pools.begin(); it != pools.end();)
            it = keep.has_query(it->first) ? std::next(it) : pools.erase(it);
    }
    if (pools.empty())
        throw std::runtime_error(args.pools_path + ": no pools");

    int sources = 0;
    for (bool s : {args.use_bm25, !args.scorer_cmd.empty(),
                   !args.replay_path.empty()})
        sources += s ? 1 : 0;
    if (sources != 1)
        throw UsageError(
            "choose exactly one scorer: --bm25, --scorer-cmd, or --replay");

    std::unique_ptr<Scorer> scorer;
    ProcessScorer* process = nullptr;
    if (args.use_bm25) {
        std::vector<TokenizedText> docs;
        docs.reserve(passages.size());
        for (const auto& p : passages)
            docs.push_back(tokenize(p.text));
        scorer = std::make_unique<Bm25Scorer>(build_stats(docs),
                                              Bm25Params{args.k1, args.b});
    } else if (!args.replay_path.empty()) {
        auto in = open_input(args.replay_path);
        try {
            scorer = std::make_unique<ReplayScorer>(in);
        } catch (const ParseError& e) {
            throw std::runtime_error(args.replay_path + ": " + e.what());
        }
    } else {
        BridgeOptions options;
        options.command = args.scorer_cmd;
        options.timeout_seconds = args.timeout;
        auto p = std::make_unique<ProcessScorer>(std::move(options));
        process = p.get();
        scorer = std::move(p);
    }

    std::optional<RecordingScorer> recorder;
    Scorer* endpoint = scorer.get();
    if (!args.save_replay_path.empty()) {
        recorder.emplace(*scorer);
        endpoint = &*recorder;
    }

    const std::string variant = args.no_instruction ? "none" : args.variant;
    Run run = rerank_pools(pools, dataset, variant, passages, *endpoint,
                           args.tag.empty() ? default_tag : args.tag,
                           global.effective_threads());
    if (process)
        process->finish();
    if (recorder) {
        std::ostringstream out;
        recorder->save(out);
        write_output(args.save_replay_path, out.str());
    }
    write_output(args.out_path, run_to_string(run));
    return 0;
}

// --- subcommand bodies ------------------------------------------------------

int cmd_chunk(const std::string& docs_path, const std::string& out_path,
              int window, int stride) {
    const auto documents = load_file(docs_path, [](std::istream& in) {
        return load_documents(in);
    });
    std::vector<Passage> passages;
    for (const auto& doc : documents) {
        auto chunks = chunk_document(doc.doc_id, doc.text, window, stride);
        passages.insert(passages.end(),
                        std::make_move_iterator(chunks.begin()),
                        std::make_move_iterator(chunks.end()));
    }
    std::ostringstream out;
    write_passages(out, passages);
    write_output(out_path, out.str());
    return 0;
}

int cmd_pool(const Global& global, const std::string& qrels_path,
             const std::vector<std::string>& run_paths,
             const std::string& out_path, std::size_t max_size) {
    const Qrels qrels = load_qrels_file(qrels_path);
    std::vector<Run> runs;
    runs.reserve(run_paths.size());
    for (const auto& path : run_paths)
        runs.push_back(load_run(path, global.quiet));
    const auto pools = build_pool(qrels, runs, max_size);
    std::ostringstream out;
    write_pools(out, pools);
    write_output(out_path, out.str());
    return 0;
}

int cmd_evaluate(const Global& global, const std::vector<std::string>& run_paths,
                 const std::string& qrels_path, const std::string& metric,
                 bool per_query, bool as_json) {
    const MetricSpec spec = parse_metric_spec(metric);
    if (spec.kind == MetricKind::PMrr)
        throw UsageError("p-mrr needs two runs and two qrels; use paired-eval");
    const Qrels qrels = load_qrels_file(qrels_path);

    MetricReport report;
    std::vector<std::string> warnings;
    if (spec.kind == MetricKind::RobustnessAtK) {
        if (run_paths.empty())
            throw UsageError("robustness@K needs at least one --run");
        MetricSpec ndcg;
        ndcg.kind = MetricKind::NdcgAtK;
        ndcg.k = spec.k;
        std::map<std::string, double> minima;
        for (const auto& path : run_paths) {
            const Run run = load_run(path, global.quiet);
            const MetricReport variant =
                evaluate_standard(run, qrels, ndcg, &warnings);
            for (const auto& [qid, value] : variant.per_query) {
                auto [it, inserted] = minima.emplace(qid, value);
                if (!inserted && value < it->second)
                    it->second = value;
            }
        }
        report = macro_aggregate(spec.name(), spec.k, std::move(minima));
    } else {
        if (run_paths.size() != 1)
            throw UsageError("metric " + spec.name() +
                             " evaluates exactly one --run");
        const Run run = load_run(run_paths.front(), global.quiet);
        report = evaluate_standard(run, qrels, spec, &warnings);
    }
    emit_warnings(warnings, global.quiet);
    std::cout << (as_json ? render_metric_json(report)
                          : render_metric_tsv(report, per_query));
    return 0;
}

int cmd_paired_eval(const Global& global, const std::string& run_og_path,
                    const std::string& run_new_path,
                    const std::string& qrels_og_path,
                    const std::string& qrels_new_path,
                    const std::string& metric, bool per_query, bool as_json) {
    const MetricSpec spec = parse_metric_spec(metric);
    if (spec.kind == MetricKind::PMrr || spec.kind == MetricKind::RobustnessAtK)
        throw UsageError("--metric picks the standard metric reported next "
                         "to p-MRR; use map, ndcg@K, or mrr");
    const Run run_og = load_run(run_og_path, global.quiet);
    const Run run_new = load_run(run_new_path, global.quiet);
    const Qrels qrels_og = load_qrels_file(qrels_og_path);
    const Qrels qrels_new = load_qrels_file(qrels_new_path);
    const PairedReport report =
        paired_evaluate(run_og, run_new, qrels_og, qrels_new, spec);
    emit_warnings(report.warnings, global.quiet);
    std::cout << (as_json ? render_paired_json(report)
                          : render_paired_tsv(report, per_query));
    return 0;
}

int cmd_ablate(const Global& global,
               const std::vector<std::string>& variant_specs,
               const std::string& qrels_path, const std::string& baseline,
               const std::string& metric, bool as_json) {
    const MetricSpec spec = parse_metric_spec(metric);
    const Qrels qrels = load_qrels_file(qrels_path);
    std::map<std::string, MetricReport> by_variant;
    for (const auto& entry : variant_specs) {
        const std::size_t eq = entry.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size())
            throw UsageError("--run expects NAME=FILE, got '" + entry + "'");
        const std::string name = entry.substr(0, eq);
        if (by_variant.count(name))
            throw UsageError("variant '" + name + "' given twice");
        const Run run = load_run(entry.substr(eq + 1), global.quiet);
        std::vector<std::string> warnings;
        by_variant.emplace(name,
                           evaluate_standard(run, qrels, spec, &warnings));
        emit_warnings(warnings, global.quiet);
    }
    const DeltaReport report = variant_delta_report(by_variant, baseline);
    std::cout << (as_json ? render_delta_json(report)
                          : render_delta_tsv(report));
    return 0;
}

int cmd_stats(const std::string& dataset_path, const std::string& qrels_og_path,
              const std::string& qrels_new_path, bool as_json) {
    const auto dataset = load_dataset_file(dataset_path);
    const Qrels qrels_og = load_qrels_file(qrels_og_path);
    std::optional<Qrels> qrels_new;
    if (!qrels_new_path.empty())
        qrels_new = load_qrels_file(qrels_new_path);
    const CorpusStats stats =
        dataset_stats(dataset, qrels_og, qrels_new ? &*qrels_new : nullptr);
    std::cout << (as_json ? render_stats_json(stats) : render_stats_tsv(stats));
    return 0;
}

int cmd_filter_train(const Global& global, const std::string& candidates_path,
                     const std::string& out_path, double threshold,
                     const std::string& scorer_cmd,
                     const std::string& replay_path,
                     const std::string& dataset_path, double timeout) {
    auto candidates = load_file(candidates_path, [](std::istream& in) {
        return load_candidates(in);
    });
    bool missing_prob = false;
    for (const auto& c : candidates)
        if (!c.scorer_prob) {
            missing_prob = true;
            break;
        }
    if (missing_prob) {
        if (!scorer_cmd.empty() && !replay_path.empty())
            throw UsageError("choose one of --scorer-cmd and --replay");
        std::unique_ptr<Scorer> scorer;
        ProcessScorer* process = nullptr;
        if (!replay_path.empty()) {
            auto in = open_input(replay_path);
            try {
                scorer = std::make_unique<ReplayScorer>(in);
            } catch (const ParseError& e) {
                throw std::runtime_error(replay_path + ": " + e.what());
            }
        } else if (!scorer_cmd.empty()) {
            BridgeOptions options;
            options.command = scorer_cmd;
            options.timeout_seconds = timeout;
            auto p = std::make_unique<ProcessScorer>(std::move(options));
            process = p.get();
            scorer = std::move(p);
        } else {
            throw UsageError(
                "candidates lack scorer_prob; provide --scorer-cmd or --replay");
        }
        std::map<std::string, std::string> query_text;
        if (!dataset_path.empty())
            for (const auto& q : load_dataset_file(dataset_path))
                query_text.emplace(q.query_id, q.query_text);
        score_candidates(candidates, *scorer, query_text);
        if (process)
            process->finish();
    }
    if (!(threshold >= 0.0 && threshold <= 1.0))
        throw UsageError("--threshold must lie in [0,1]");

    const auto kept = filter_by_verdict(candidates, threshold);
    const auto balanced = balance_per_query(kept);
    const FilterSummary summary =
        summarize_filter(candidates.size(), kept.size(), candidates, balanced);

    std::ostringstream out;
    write_candidates(out, balanced);
    write_output(out_path, out.str());
    std::ostream& summary_out = out_path == "-" ? std::cerr : std::cout;
    if (!(global.quiet && out_path == "-"))
        summary_out << render_filter_summary(summary);
    return 0;
}

int cmd_gen_fixtures(const FixtureOptions& options, const std::string& dir) {
    const FixtureSet fixtures = generate_fixtures(options);
    std::filesystem::create_directories(dir);
    auto path = [&dir](const char* name) {
        return (std::filesystem::path(dir) / name).string();
    };
    {
        std::ostringstream out;
        write_dataset(out, fixtures.dataset);
        write_output(path("dataset.jsonl"), out.str());
    }
    {
        std::ostringstream out;
        write_documents(out, fixtures.documents);
        write_output(path("docs.jsonl"), out.str());
    }
    {
        std::ostringstream out;
        write_qrels(out, fixtures.qrels_original);
        write_output(path("qrels_original.txt"), out.str());
    }
    {
        std::ostringstream out;
        write_qrels(out, fixtures.qrels_modified);
        write_output(path("qrels_modified.txt"), out.str());
    }
    for (std::size_t i = 0; i < fixtures.contributing_runs.size(); ++i) {
        const std::string name =
            "run.contrib" + std::to_string(i + 1) + ".txt";
        write_output((std::filesystem::path(dir) / name).string(),
                     run_to_string(fixtures.contributing_runs[i]));
    }
    {
        std::ostringstream out;
        write_candidates(out, fixtures.candidates);
        write_output(path("candidates.jsonl"), out.str());
    }
    return 0;
}

int run_main(int argc, char** argv) {
    CLI::App app{
        "ireval - pooled reranking evaluation with paired instruction "
        "metrics"};
    app.require_subcommand(1);
    app.fallthrough(true);

    Global global;
    app.add_option("--threads", global.threads,
                   "worker threads (default: hardware concurrency; never "
                   "changes output bytes)");
    app.add_option("--seed", global.seed, "seed for fixture generation");
    app.add_flag("--quiet", global.quiet, "suppress warnings on stderr");

    // chunk
    auto* chunk = app.add_subcommand(
        "chunk", "Split documents into fixed word windows.\n  example: ireval "
                 "chunk --docs docs.jsonl --out passages.jsonl");
    std::string chunk_docs, chunk_out = "-";
    int chunk_window = 400, chunk_stride = 200;
    chunk->add_option("--docs", chunk_docs,
                      "JSONL documents: {\"doc_id\":..., \"text\":...}")
        ->required();
    chunk->add_option("--out", chunk_out, "output passages file, - for stdout");
    chunk->add_option("--window", chunk_window, "words per passage");
    chunk->add_option("--stride", chunk_stride, "words between window starts");

    // pool
    auto* pool = app.add_subcommand(
        "pool", "Build per-query candidate pools from qrels and runs.\n  "
                "example: ireval pool --qrels qrels.txt --runs a.txt b.txt "
                "--out pools.txt");
    std::string pool_qrels, pool_out = "-";
    std::vector<std::string> pool_runs;
    std::size_t pool_max = 100;
    pool->add_option("--qrels", pool_qrels, "TREC qrels: qid it docid grade")
        ->required();
    pool->add_option("--runs", pool_runs, "contributing TREC run files")
        ->required()
        ->expected(-1);
    pool->add_option("--out", pool_out, "output pool file, - for stdout");
    pool->add_option("--max-size", pool_max, "pool size cap per query");

    // rank-bm25
    auto* rank = app.add_subcommand(
        "rank-bm25", "Rerank pools with the built-in lexical scorer.\n  "
                     "example: ireval rank-bm25 --dataset d.jsonl --passages "
                     "p.jsonl --pools pools.txt --out run.txt");
    RerankArgs rank_args;
    rank_args.use_bm25 = true;
    add_rerank_io(rank, rank_args);
    rank->add_option("--k1", rank_args.k1, "BM25 k1");
    rank->add_option("--b", rank_args.b, "BM25 b");
    rank->add_option("--tag", rank_args.tag, "run tag (default bm25)");
    rank->add_option("--save-replay", rank_args.save_replay_path,
                     "also write a replay score file");

    // rerank
    auto* rerank = app.add_subcommand(
        "rerank", "Rerank pools with an external scorer over the line "
                  "protocol.\n  example: ireval rerank --dataset d.jsonl "
                  "--passages p.jsonl --pools pools.txt --scorer-cmd "
                  "'./scorer' --out run.txt");
    RerankArgs rerank_args;
    add_rerank_io(rerank, rerank_args);
    rerank->add_flag("--bm25", rerank_args.use_bm25,
                     "use the built-in lexical scorer");
    rerank->add_option("--k1", rerank_args.k1, "BM25 k1 (with --bm25)");
    rerank->add_option("--b", rerank_args.b, "BM25 b (with --bm25)");
    rerank->add_option("--scorer-cmd", rerank_args.scorer_cmd,
                       "scorer command line (or set IREVAL_SCORER_CMD)");
    rerank->add_option("--replay", rerank_args.replay_path,
                       "precomputed score file: '<key> <score>' lines");
    rerank->add_option("--save-replay", rerank_args.save_replay_path,
                       "record scores to a replay file");
    rerank->add_option("--timeout", rerank_args.timeout,
                       "seconds of scorer inactivity tolerated");
    rerank->add_option("--tag", rerank_args.tag, "run tag (default rerank)");

    // evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score a run (or variant runs) against qrels.\n  example: "
                    "ireval evaluate --run run.txt --qrels qrels.txt --metric "
                    "map");
    std::vector<std::string> eval_runs;
    std::string eval_qrels, eval_metric = "map";
    bool eval_per_query = false, eval_json = false;
    evaluate->add_option("--run", eval_runs,
                         "TREC run file; repeat for robustness@K variants")
        ->required();
    evaluate->add_option("--qrels", eval_qrels, "TREC qrels file")->required();
    evaluate->add_option("--metric", eval_metric,
                         "map | ndcg@K | mrr | robustness@K");
    evaluate->add_flag("--per-query", eval_per_query, "also print each query");
    evaluate->add_flag("--json", eval_json, "structured output");

    // paired-eval
    auto* paired = app.add_subcommand(
        "paired-eval", "Standard metric plus p-MRR across an instruction "
                       "change.\n  example: ireval paired-eval --run-og a.txt "
                       "--run-new b.txt --qrels-og qa.txt --qrels-new qb.txt "
                       "--metric map");
    std::string paired_run_og, paired_run_new, paired_qrels_og,
        paired_qrels_new, paired_metric = "map";
    bool paired_per_query = false, paired_json = false;
    paired->add_option("--run-og", paired_run_og,
                       "run made with the original instructions")
        ->required();
    paired->add_option("--run-new", paired_run_new,
                       "run made with the modified instructions")
        ->required();
    paired->add_option("--qrels-og", paired_qrels_og, "original qrels")
        ->required();
    paired->add_option("--qrels-new", paired_qrels_new,
                       "re-annotated qrels for the modified instructions")
        ->required();
    paired->add_option("--metric", paired_metric,
                       "standard metric: map | ndcg@K | mrr");
    paired->add_flag("--per-query", paired_per_query,
                     "also print per-query and per-document rows");
    paired->add_flag("--json", paired_json, "structured output");

    // ablate
    auto* ablate = app.add_subcommand(
        "ablate", "Compare instruction variants against a baseline.\n  "
                  "example: ireval ablate --qrels q.txt --baseline none "
                  "--run none=a.txt --run full=b.txt --metric map");
    std::vector<std::string> ablate_runs;
    std::string ablate_qrels, ablate_baseline, ablate_metric = "map";
    bool ablate_json = false;
    ablate->add_option("--run", ablate_runs, "NAME=FILE variant run")
        ->required();
    ablate->add_option("--qrels", ablate_qrels, "TREC qrels file")->required();
    ablate->add_option("--baseline", ablate_baseline,
                       "variant name deltas are taken against")
        ->required();
    ablate->add_option("--metric", ablate_metric, "map | ndcg@K | mrr");
    ablate->add_flag("--json", ablate_json, "structured output");

    // stats
    auto* stats = app.add_subcommand(
        "stats", "Dataset statistics: query/instruction lengths, judgments.\n"
                 "  example: ireval stats --dataset d.jsonl --qrels-og q.txt");
    std::string stats_dataset, stats_qrels_og, stats_qrels_new;
    bool stats_json = false;
    stats->add_option("--dataset", stats_dataset, "JSONL query records")
        ->required();
    stats->add_option("--qrels-og", stats_qrels_og, "original qrels")
        ->required();
    stats->add_option("--qrels-new", stats_qrels_new,
                      "modified qrels (adds the annotated-subset rows)");
    stats->add_flag("--json", stats_json, "structured output");

    // filter-train
    auto* filter = app.add_subcommand(
        "filter-train", "Keep scorer-confirmed candidates, one pair per "
                        "query.\n  example: ireval filter-train --candidates "
                        "c.jsonl --out kept.jsonl");
    std::string filter_candidates, filter_out = "-";
    std::string filter_scorer_cmd, filter_replay, filter_dataset;
    double filter_threshold = 0.5, filter_timeout = 60.0;
    filter->add_option("--candidates", filter_candidates,
                       "JSONL generated candidates")
        ->required();
    filter->add_option("--out", filter_out,
                       "output candidate file, - for stdout");
    filter->add_option("--threshold", filter_threshold,
                       "relevance probability decision boundary");
    filter->add_option("--scorer-cmd", filter_scorer_cmd,
                       "scorer command to fill missing scorer_prob");
    filter->add_option("--replay", filter_replay,
                       "replay score file to fill missing scorer_prob");
    filter->add_option("--dataset", filter_dataset,
                       "query records (gives scorers the query text)");
    filter->add_option("--timeout", filter_timeout,
                       "seconds of scorer inactivity tolerated");

    // gen-fixtures
    auto* gen = app.add_subcommand(
        "gen-fixtures", "Write a synthetic desk-scale corpus family.\n  "
                        "example: ireval gen-fixtures --out-dir fixtures");
    FixtureOptions fixture_options;
    std::string gen_dir;
    gen->add_option("--out-dir", gen_dir, "output directory")->required();
    gen->add_option("--queries", fixture_options.queries, "query count");
    gen->add_option("--docs-per-query", fixture_options.docs_per_query,
                    "documents generated per query");
    gen->add_option("--relevant", fixture_options.relevant_per_query,
                    "relevant documents per query");
    gen->add_option("--changed", fixture_options.changed_per_query,
                    "relevant documents that lose relevance");
    gen->add_option("--judged-nonrel", fixture_options.judged_nonrelevant,
                    "explicit grade-0 judgments per query");
    gen->add_option("--variants", fixture_options.variant_count,
                    "instruction paraphrases per query");
    gen->add_option("--candidates", fixture_options.candidates_per_query,
                    "training candidates per query");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    if (chunk->parsed()) {
        if (chunk_window < 1 || chunk_stride < 1 || chunk_stride > chunk_window)
            throw UsageError("need 0 < stride <= window");
        return cmd_chunk(chunk_docs, chunk_out, chunk_window, chunk_stride);
    }
    if (pool->parsed()) {
        if (pool_max < 1)
            throw UsageError("--max-size must be at least 1");
        return cmd_pool(global, pool_qrels, pool_runs, pool_out, pool_max);
    }
    if (rank->parsed())
        return do_rerank(global, rank_args, "bm25");
    if (rerank->parsed()) {
        if (rerank_args.scorer_cmd.empty() && !rerank_args.use_bm25 &&
            rerank_args.replay_path.empty()) {
            if (const char* env = std::getenv("IREVAL_SCORER_CMD"))
                rerank_args.scorer_cmd = env;
        }
        return do_rerank(global, rerank_args, "rerank");
    }
    if (evaluate->parsed())
        return cmd_evaluate(global, eval_runs, eval_qrels, eval_metric,
                            eval_per_query, eval_json);
    if (paired->parsed())
        return cmd_paired_eval(global, paired_run_og, paired_run_new,
                               paired_qrels_og, paired_qrels_new,
                               paired_metric, paired_per_query, paired_json);
    if (ablate->parsed())
        return cmd_ablate(global, ablate_runs, ablate_qrels, ablate_baseline,
                          ablate_metric, ablate_json);
    if (stats->parsed())
        return cmd_stats(stats_dataset, stats_qrels_og, stats_qrels_new,
                         stats_json);
    if (filter->parsed())
        return cmd_filter_train(global, filter_candidates, filter_out,
                                filter_threshold, filter_scorer_cmd,
                                filter_replay, filter_dataset, filter_timeout);
    if (gen->parsed()) {
        fixture_options.seed = global.seed;
        return cmd_gen_fixtures(fixture_options, gen_dir);
    }
    throw UsageError("no subcommand given");
}

}  // namespace

int main(int argc, char** argv) {
    std::ios::sync_with_stdio(false);
    try {
        return run_main(argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
