#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "ireval/common.hpp"

#ifndef IREVAL_BIN_PATH
#error "IREVAL_BIN_PATH must point at the ireval binary"
#endif
#ifndef STUB_SCORER_PATH
#error "STUB_SCORER_PATH must point at the protocol test double"
#endif

namespace {

const std::string kBin = IREVAL_BIN_PATH;
const std::string kStub = STUB_SCORER_PATH;

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

// One scratch directory for the whole binary, unique per run.
const std::string& scratch_dir() {
    static const std::string dir = [] {
        std::string tmpl = "/tmp/ireval_cli_XXXXXX";
        char* made = mkdtemp(tmpl.data());
        REQUIRE(made != nullptr);
        return std::string(made);
    }();
    return dir;
}

std::string path_in(const std::string& name) {
    return scratch_dir() + "/" + name;
}

CmdResult run_cmd(const std::string& command_line) {
    static int counter = 0;
    const std::string out_path =
        path_in(".stdout." + std::to_string(counter));
    const std::string err_path =
        path_in(".stderr." + std::to_string(counter));
    ++counter;
    const std::string full =
        command_line + " >" + out_path + " 2>" + err_path;
    const int status = std::system(full.c_str());
    CmdResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = ireval::read_file(out_path);
    result.err = ireval::read_file(err_path);
    return result;
}

CmdResult tool(const std::string& args) { return run_cmd(kBin + " " + args); }

void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    REQUIRE(out.good());
    out << content;
    REQUIRE(out.good());
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return in.good();
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

// Fixture corpus shared by the pipeline cases, generated once.
struct Pipeline {
    std::string dir = scratch_dir() + "/fx";
    std::string dataset = dir + "/dataset.jsonl";
    std::string docs = dir + "/docs.jsonl";
    std::string qrels_og = dir + "/qrels_original.txt";
    std::string qrels_new = dir + "/qrels_modified.txt";
    std::string run1 = dir + "/run.contrib1.txt";
    std::string run2 = dir + "/run.contrib2.txt";
    std::string candidates = dir + "/candidates.jsonl";
    std::string passages = dir + "/passages.jsonl";
    std::string pools = dir + "/pools.txt";
    std::string run_og = dir + "/run_og.txt";
    std::string run_new = dir + "/run_new.txt";
    std::string run_none = dir + "/run_none.txt";

    Pipeline() {
        static bool ready = false;
        if (ready) return;
        ready = true;
        auto gen = tool(
            "--seed 11 gen-fixtures --out-dir " + dir +
            " --queries 6 --docs-per-query 12 --relevant 3 --changed 1"
            " --judged-nonrel 3 --variants 2 --candidates 4");
        REQUIRE(gen.exit_code == 0);
        auto chunk = tool("chunk --docs " + docs + " --window 20 --stride 10"
                            " --out " + passages);
        REQUIRE(chunk.exit_code == 0);
        auto pool = tool("pool --qrels " + qrels_og + " --runs " + run1 +
                           " " + run2 + " --max-size 10 --out " + pools);
        REQUIRE(pool.exit_code == 0);
        auto og = tool("rank-bm25 --dataset " + dataset + " --passages " +
                         passages + " --pools " + pools +
                         " --variant original --out " + run_og);
        REQUIRE(og.exit_code == 0);
        auto nw = tool("rank-bm25 --dataset " + dataset + " --passages " +
                         passages + " --pools " + pools +
                         " --variant modified --restrict-to-qrels " +
                         qrels_new + " --out " + run_new);
        REQUIRE(nw.exit_code == 0);
        auto none = tool("rank-bm25 --dataset " + dataset + " --passages " +
                           passages + " --pools " + pools +
                           " --no-instruction --out " + run_none);
        REQUIRE(none.exit_code == 0);
    }
};

}  // namespace

TEST_CASE("help and argument validation exit codes") {
    CHECK(tool("--help").exit_code == 0);
    CHECK(tool("--help").out.find("ireval") != std::string::npos);
    CHECK(tool("evaluate --help").exit_code == 0);

    CHECK(tool("").exit_code == 1);                     // no subcommand
    CHECK(tool("--bogus-flag").exit_code == 1);         // unknown flag
    CHECK(tool("no-such-command").exit_code == 1);

    auto bad_metric = tool("evaluate --run /dev/null --qrels /dev/null "
                             "--metric precision");
    CHECK(bad_metric.exit_code == 1);
    CHECK(bad_metric.err.find("unknown metric") != std::string::npos);

    auto missing = tool("evaluate --run " + path_in("absent.txt") +
                          " --qrels " + path_in("absent2.txt") +
                          " --metric map");
    CHECK(missing.exit_code == 1);  // unreadable input is a usage problem

    write_text(path_in("garbled.txt"), "one two\n");
    auto garbled = tool("evaluate --run " + path_in("garbled.txt") +
                          " --qrels " + path_in("garbled.txt") +
                          " --metric map");
    CHECK(garbled.exit_code == 2);  // readable but malformed is a data problem
    CHECK(garbled.err.find("line 1") != std::string::npos);
}

TEST_CASE("chunk windows documents and validates its knobs") {
    std::string text;
    for (int i = 0; i < 1000; ++i)
        text += (i ? " w" : "w") + std::to_string(i);
    write_text(path_in("big.jsonl"),
               "{\"doc_id\":\"big\",\"text\":\"" + text + "\"}\n");

    auto chunk = tool("chunk --docs " + path_in("big.jsonl") + " --out -");
    CHECK(chunk.exit_code == 0);
    CHECK(count_lines(chunk.out) == 4);  // 400-word windows, 200-word stride
    CHECK(chunk.out.find("\"passage_index\"") != std::string::npos);

    CHECK(tool("chunk --docs " + path_in("big.jsonl") +
                 " --window 0").exit_code == 1);
    CHECK(tool("chunk --docs " + path_in("big.jsonl") +
                 " --window 10 --stride 20").exit_code == 1);
}

TEST_CASE("generated fixtures feed the whole pipeline") {
    Pipeline fx;
    CHECK(file_exists(fx.dataset));
    CHECK(file_exists(fx.candidates));
    CHECK(count_lines(ireval::read_file(fx.pools)) > 0);

    auto eval = tool("evaluate --run " + fx.run_og + " --qrels " +
                       fx.qrels_og + " --metric map");
    REQUIRE(eval.exit_code == 0);
    CHECK(eval.out.find("map\tall\t") == 0);

    auto per_query = tool("evaluate --run " + fx.run_og + " --qrels " +
                            fx.qrels_og + " --metric ndcg@5 --per-query");
    REQUIRE(per_query.exit_code == 0);
    CHECK(count_lines(per_query.out) == 7);  // 6 queries + the aggregate
    CHECK(per_query.out.find("ndcg@5\tq001\t") == 0);

    auto json = tool("evaluate --run " + fx.run_og + " --qrels " +
                       fx.qrels_og + " --metric map --json");
    REQUIRE(json.exit_code == 0);
    CHECK(json.out.find("\"aggregate\"") != std::string::npos);
}

TEST_CASE("paired evaluation emits the two-column row") {
    Pipeline fx;
    auto paired = tool("paired-eval --run-og " + fx.run_og + " --run-new " +
                         fx.run_new + " --qrels-og " + fx.qrels_og +
                         " --qrels-new " + fx.qrels_new + " --metric map");
    REQUIRE(paired.exit_code == 0);
    std::istringstream lines(paired.out);
    std::string header, row;
    REQUIRE(std::getline(lines, header));
    REQUIRE(std::getline(lines, row));
    CHECK(header == "map\tp-mrr");
    // Two tab-separated one-decimal numbers.
    const auto tab = row.find('\t');
    REQUIRE(tab != std::string::npos);
    for (const std::string& field :
         {row.substr(0, tab), row.substr(tab + 1)}) {
        double value = 0.0;
        CHECK(ireval::parse_double(field, &value));
        CHECK(field.find('.') == field.size() - 2);
    }

    auto json = tool("paired-eval --run-og " + fx.run_og + " --run-new " +
                       fx.run_new + " --qrels-og " + fx.qrels_og +
                       " --qrels-new " + fx.qrels_new +
                       " --metric ndcg@5 --json");
    REQUIRE(json.exit_code == 0);
    CHECK(json.out.find("\"p_mrr\"") != std::string::npos);

    auto bad = tool("paired-eval --run-og " + fx.run_og + " --run-new " +
                      fx.run_new + " --qrels-og " + fx.qrels_og +
                      " --qrels-new " + fx.qrels_new + " --metric p-mrr");
    CHECK(bad.exit_code == 1);
}

TEST_CASE("mismatched candidate sets are a hard failure naming the query") {
    write_text(path_in("mm_qrels_og.txt"), "q1 0 d1 1\n");
    write_text(path_in("mm_qrels_new.txt"), "q1 0 d1 0\n");
    write_text(path_in("mm_run_og.txt"),
               "q1 Q0 d1 1 2 t\nq1 Q0 d2 2 1 t\n");
    write_text(path_in("mm_run_new.txt"),
               "q1 Q0 d1 1 2 t\nq1 Q0 d3 2 1 t\n");
    auto result = tool("paired-eval --run-og " + path_in("mm_run_og.txt") +
                         " --run-new " + path_in("mm_run_new.txt") +
                         " --qrels-og " + path_in("mm_qrels_og.txt") +
                         " --qrels-new " + path_in("mm_qrels_new.txt") +
                         " --metric map");
    CHECK(result.exit_code == 2);
    CHECK(result.err.find("q1") != std::string::npos);
    CHECK(result.err.find("d2") != std::string::npos);
    CHECK(result.err.find("d3") != std::string::npos);
}

TEST_CASE("reranking is deterministic across thread counts") {
    Pipeline fx;
    const std::string a = fx.dir + "/threads1.txt";
    const std::string b = fx.dir + "/threads4.txt";
    REQUIRE(tool("--threads 1 rank-bm25 --dataset " + fx.dataset +
                   " --passages " + fx.passages + " --pools " + fx.pools +
                   " --out " + a).exit_code == 0);
    REQUIRE(tool("--threads 4 rank-bm25 --dataset " + fx.dataset +
                   " --passages " + fx.passages + " --pools " + fx.pools +
                   " --out " + b).exit_code == 0);
    CHECK(ireval::read_file(a) == ireval::read_file(b));
    CHECK(ireval::read_file(a) == ireval::read_file(fx.run_og));
}

TEST_CASE("recorded replays reproduce a run byte for byte") {
    Pipeline fx;
    const std::string live = fx.dir + "/replay_live.txt";
    const std::string replayed = fx.dir + "/replay_replayed.txt";
    const std::string replay_file = fx.dir + "/scores.replay";
    REQUIRE(tool("rerank --bm25 --dataset " + fx.dataset + " --passages " +
                   fx.passages + " --pools " + fx.pools + " --save-replay " +
                   replay_file + " --out " + live).exit_code == 0);
    REQUIRE(tool("rerank --replay " + replay_file + " --dataset " +
                   fx.dataset + " --passages " + fx.passages + " --pools " +
                   fx.pools + " --out " + replayed).exit_code == 0);
    CHECK(ireval::read_file(live) == ireval::read_file(replayed));
    CHECK(count_lines(ireval::read_file(replay_file)) > 0);
}

TEST_CASE("external scorers plug in via --scorer-cmd or the environment") {
    Pipeline fx;
    const std::string by_flag = fx.dir + "/stub_flag.txt";
    const std::string by_env = fx.dir + "/stub_env.txt";
    REQUIRE(tool("rerank --scorer-cmd '" + kStub + " --mode score'"
                   " --dataset " + fx.dataset + " --passages " + fx.passages +
                   " --pools " + fx.pools + " --out " + by_flag).exit_code ==
            0);
    REQUIRE(run_cmd("IREVAL_SCORER_CMD='" + kStub + " --mode score' " + kBin +
                    " rerank --dataset " + fx.dataset + " --passages " +
                    fx.passages + " --pools " + fx.pools + " --out " +
                    by_env).exit_code == 0);
    CHECK(ireval::read_file(by_flag) == ireval::read_file(by_env));

    // No scorer at all is a usage error.
    CHECK(run_cmd("env -u IREVAL_SCORER_CMD " + kBin + " rerank --dataset " +
                  fx.dataset + " --passages " + fx.passages + " --pools " +
                  fx.pools).exit_code == 1);
    // Two scorers at once, likewise.
    CHECK(tool("rerank --bm25 --replay /dev/null --dataset " + fx.dataset +
                 " --passages " + fx.passages + " --pools " +
                 fx.pools).exit_code == 1);
}

TEST_CASE("ablation compares variants against a baseline") {
    Pipeline fx;
    auto result = tool("ablate --run original=" + fx.run_og +
                         " --run none=" + fx.run_none + " --qrels " +
                         fx.qrels_og + " --baseline original --metric map");
    REQUIRE(result.exit_code == 0);
    std::istringstream lines(result.out);
    std::string first;
    REQUIRE(std::getline(lines, first));
    CHECK(first.rfind("original\t", 0) == 0);
    CHECK(first.substr(first.rfind('\t') + 1) == "0.0");
    CHECK(count_lines(result.out) == 2);

    CHECK(tool("ablate --run original=" + fx.run_og + " --run original=" +
                 fx.run_none + " --qrels " + fx.qrels_og +
                 " --baseline original --metric map").exit_code == 1);
    CHECK(tool("ablate --run bad-entry --qrels " + fx.qrels_og +
                 " --baseline x --metric map").exit_code == 1);
}

TEST_CASE("robustness evaluates the per-query minimum over runs") {
    Pipeline fx;
    auto robust = tool("evaluate --run " + fx.run_og + " --run " +
                         fx.run_none + " --qrels " + fx.qrels_og +
                         " --metric robustness@5 --per-query");
    REQUIRE(robust.exit_code == 0);
    CHECK(robust.out.find("robustness@5\tall\t") != std::string::npos);

    auto og_only = tool("evaluate --run " + fx.run_og + " --qrels " +
                          fx.qrels_og + " --metric ndcg@5");
    auto none_only = tool("evaluate --run " + fx.run_none + " --qrels " +
                            fx.qrels_og + " --metric ndcg@5");
    auto value = [](const CmdResult& r) {
        const auto pos = r.out.rfind('\t');
        double v = 0.0;
        REQUIRE(ireval::parse_double(
            r.out.substr(pos + 1, r.out.size() - pos - 2), &v));
        return v;
    };
    CHECK(value(robust) <= value(og_only) + 1e-12);
    CHECK(value(robust) <= value(none_only) + 1e-12);

    // Single-run metrics refuse multiple runs.
    CHECK(tool("evaluate --run " + fx.run_og + " --run " + fx.run_none +
                 " --qrels " + fx.qrels_og + " --metric map").exit_code == 1);
}

TEST_CASE("stats summarize both annotation rounds") {
    Pipeline fx;
    auto stats = tool("stats --dataset " + fx.dataset + " --qrels-og " +
                        fx.qrels_og + " --qrels-new " + fx.qrels_new);
    REQUIRE(stats.exit_code == 0);
    CHECK(stats.out.find("queries\t6\n") == 0);
    CHECK(stats.out.find("annotated_queries\t3\n") != std::string::npos);
    CHECK(stats.out.find("relevant_docs_per_query\t") != std::string::npos);

    auto json = tool("stats --dataset " + fx.dataset + " --qrels-og " +
                       fx.qrels_og + " --qrels-new " + fx.qrels_new +
                       " --json");
    REQUIRE(json.exit_code == 0);
    CHECK(json.out.find("\"annotated\"") != std::string::npos);

    auto og_only = tool("stats --dataset " + fx.dataset + " --qrels-og " +
                          fx.qrels_og);
    REQUIRE(og_only.exit_code == 0);
    CHECK(og_only.out.find("annotated_") == std::string::npos);
}

TEST_CASE("filter-train balances prefilled candidates") {
    Pipeline fx;
    const std::string out = fx.dir + "/filtered.jsonl";
    auto result = tool("filter-train --candidates " + fx.candidates +
                         " --out " + out);
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("input\t") == 0);
    CHECK(result.out.find("queries_kept\t") != std::string::npos);

    const std::string filtered = ireval::read_file(out);
    const std::size_t kept = count_lines(filtered);
    CHECK(kept % 2 == 0);
    // Alternating relevant / non-relevant pairs per query.
    std::istringstream lines(filtered);
    std::string line;
    std::size_t index = 0;
    while (std::getline(lines, line)) {
        const bool expect_relevant = index % 2 == 0;
        CHECK(line.find(expect_relevant ? "\"relevant\"" : "\"non-relevant\"")
              != std::string::npos);
        ++index;
    }

    CHECK(tool("filter-train --candidates " + fx.candidates +
                 " --threshold 1.5").exit_code == 1);
}

TEST_CASE("filter-train scores unscored candidates through the bridge") {
    Pipeline fx;
    write_text(path_in("unscored.jsonl"),
               "{\"query_id\":\"q001\",\"instruction_text\":\"foo\","
               "\"doc_text\":\"bar baz\",\"generated_label\":\"relevant\"}\n"
               "{\"query_id\":\"q001\",\"instruction_text\":\"foo\","
               "\"doc_text\":\"other\",\"generated_label\":\"non-relevant\"}"
               "\n");
    // Without a scorer the command must refuse.
    CHECK(tool("filter-train --candidates " +
                 path_in("unscored.jsonl")).exit_code == 1);

    auto scored = tool("filter-train --candidates " +
                         path_in("unscored.jsonl") + " --scorer-cmd '" +
                         kStub + " --mode const --value 0.9' --dataset " +
                         fx.dataset + " --out " + path_in("unscored_out.jsonl"));
    REQUIRE(scored.exit_code == 0);
    // Both candidates score 0.9: the relevant one is confirmed, the
    // non-relevant one contradicted, so the query ends up one-sided.
    CHECK(scored.out.find("after_verdict\t1\n") != std::string::npos);
    CHECK(scored.out.find("output\t0\n") != std::string::npos);
}

TEST_CASE("gen-fixtures honors the seed and rejects bad shapes") {
    const std::string dir_a = path_in("seed_a");
    const std::string dir_b = path_in("seed_b");
    const std::string dir_c = path_in("seed_c");
    REQUIRE(tool("--seed 5 gen-fixtures --out-dir " + dir_a +
                   " --queries 4").exit_code == 0);
    REQUIRE(tool("--seed 5 gen-fixtures --out-dir " + dir_b +
                   " --queries 4").exit_code == 0);
    REQUIRE(tool("--seed 6 gen-fixtures --out-dir " + dir_c +
                   " --queries 4").exit_code == 0);
    CHECK(ireval::read_file(dir_a + "/dataset.jsonl") ==
          ireval::read_file(dir_b + "/dataset.jsonl"));
    CHECK(ireval::read_file(dir_a + "/qrels_original.txt") ==
          ireval::read_file(dir_b + "/qrels_original.txt"));
    CHECK(ireval::read_file(dir_a + "/dataset.jsonl") !=
          ireval::read_file(dir_c + "/dataset.jsonl"));

    CHECK(tool("gen-fixtures --out-dir " + path_in("bad") +
                 " --queries 0").exit_code == 1);
    CHECK(tool("gen-fixtures --out-dir " + path_in("bad") +
                 " --relevant 50 --docs-per-query 10").exit_code == 1);
}
