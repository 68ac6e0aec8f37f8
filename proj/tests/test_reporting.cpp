#include <doctest.h>

#include <stdexcept>

#include <json.hpp>

#include "ireval/reporting.hpp"

using namespace ireval;

TEST_SUITE("reporting") {

TEST_CASE("one-decimal rendering rounds half to even") {
    CHECK(format_number1(0.0) == "0.0");
    CHECK(format_number1(12.14) == "12.1");
    CHECK(format_number1(12.16) == "12.2");
    CHECK(format_number1(-3.06) == "-3.1");
    CHECK(format_number1(2.0 / 3.0 * 100.0) == "66.7");
    // Ties land on the even tenth.
    CHECK(format_number1(0.25) == "0.2");
    CHECK(format_number1(0.75) == "0.8");
    CHECK(format_number1(-0.25) == "-0.2");
    // Never "-0.0".
    CHECK(format_number1(-0.04) == "0.0");
    CHECK(format_number1(-0.0) == "0.0");
    CHECK(format_number1(199.96) == "200.0");
}

TEST_CASE("percent rendering scales to points first") {
    CHECK(format_percent(0.667) == "66.7");
    CHECK(format_percent(2.0 / 3.0) == "66.7");
    CHECK(format_percent(1.0) == "100.0");
    CHECK(format_percent(-0.031) == "-3.1");
    CHECK(format_percent(0.121) == "12.1");
    CHECK(format_percent(0.0) == "0.0");
}

TEST_CASE("dataset_stats averages with the scoring tokenizer") {
    std::vector<QueryRecord> dataset{
        {"q1", "two words", "three small words", "one", {}},
        {"q2", "one", "two words!", std::nullopt, {}},
    };
    Qrels og;
    og.add({"q1", "d1", 1});
    og.add({"q1", "d2", 1});
    og.add({"q1", "d3", 0});
    og.add({"q2", "d1", 1});
    Qrels modified;
    modified.add({"q1", "d1", 1});
    modified.add({"q1", "d2", 0});

    CorpusStats stats = dataset_stats(dataset, og, &modified);
    CHECK(stats.original.query_count == 2);
    CHECK(stats.original.mean_query_words == doctest::Approx(1.5));
    CHECK(stats.original.mean_instruction_words == doctest::Approx(2.5));
    CHECK(stats.original.mean_relevant_per_query == doctest::Approx(1.5));

    REQUIRE(stats.annotated.has_value());
    CHECK(stats.annotated->query_count == 1);
    CHECK(stats.annotated->mean_query_words == doctest::Approx(2.0));
    // The annotated row measures the modified instruction.
    CHECK(stats.annotated->mean_instruction_words == doctest::Approx(1.0));
    CHECK(stats.annotated->mean_relevant_per_query == doctest::Approx(1.0));
}

TEST_CASE("dataset_stats tolerates empty inputs") {
    CorpusStats stats = dataset_stats({}, Qrels{});
    CHECK(stats.original.query_count == 0);
    CHECK(stats.original.mean_query_words == 0.0);
    CHECK_FALSE(stats.annotated.has_value());
}

TEST_CASE("variant deltas are against the named baseline") {
    std::map<std::string, MetricReport> by_variant;
    by_variant["original"] =
        macro_aggregate("map", std::nullopt, {{"q1", 0.6}, {"q2", 0.4}});
    by_variant["keywords"] =
        macro_aggregate("map", std::nullopt, {{"q1", 0.5}, {"q2", 0.3}});
    by_variant["none"] =
        macro_aggregate("map", std::nullopt, {{"q1", 0.7}, {"q2", 0.5}});

    DeltaReport report = variant_delta_report(by_variant, "original");
    REQUIRE(report.rows.size() == 3);
    CHECK(report.rows[0].variant == "original");
    CHECK(report.rows[0].delta == 0.0);
    CHECK(report.rows[1].variant == "keywords");
    CHECK(report.rows[1].delta == doctest::Approx(-0.1).epsilon(1e-12));
    CHECK(report.rows[2].variant == "none");
    CHECK(report.rows[2].delta == doctest::Approx(0.1).epsilon(1e-12));

    // Deltas swap sign when the baseline flips to the other variant.
    DeltaReport flipped = variant_delta_report(by_variant, "none");
    CHECK(flipped.rows[0].variant == "none");
    for (const auto& row : flipped.rows)
        if (row.variant == "original")
            CHECK(row.delta == doctest::Approx(-0.1).epsilon(1e-12));
}

TEST_CASE("variant deltas insist on one query set") {
    std::map<std::string, MetricReport> by_variant;
    by_variant["original"] =
        macro_aggregate("map", std::nullopt, {{"q1", 0.6}});
    by_variant["keywords"] =
        macro_aggregate("map", std::nullopt, {{"q2", 0.5}});
    CHECK_THROWS_WITH_AS(variant_delta_report(by_variant, "original"),
                         doctest::Contains("different query set"),
                         std::runtime_error);
    CHECK_THROWS_WITH_AS(variant_delta_report(by_variant, "missing"),
                         doctest::Contains("baseline"), std::runtime_error);
}

TEST_CASE("metric reports render as TSV and JSON") {
    MetricReport report =
        macro_aggregate("ndcg@5", 5, {{"q1", 0.5}, {"q2", 1.0}});
    CHECK(render_metric_tsv(report, false) == "ndcg@5\tall\t0.75\n");
    CHECK(render_metric_tsv(report, true) ==
          "ndcg@5\tq1\t0.5\n"
          "ndcg@5\tq2\t1\n"
          "ndcg@5\tall\t0.75\n");

    auto j = nlohmann::json::parse(render_metric_json(report));
    CHECK(j["metric"] == "ndcg@5");
    CHECK(j["k"] == 5);
    CHECK(j["aggregate"] == 0.75);
    CHECK(j["per_query"]["q1"] == 0.5);
}

TEST_CASE("stats render with one decimal") {
    CorpusStats stats;
    stats.original = {52, 10.86, 30.64, 19.2};
    stats.annotated = StatsRow{26, 10.86, 34.15, 9.0};
    std::string tsv = render_stats_tsv(stats);
    CHECK(tsv.find("queries\t52\n") != std::string::npos);
    CHECK(tsv.find("query_words\t10.9\n") != std::string::npos);
    CHECK(tsv.find("annotated_queries\t26\n") != std::string::npos);

    auto j = nlohmann::json::parse(render_stats_json(stats));
    CHECK(j["original"]["queries"] == 52);
    CHECK(j["annotated"]["instruction_words"] == 34.15);
}

TEST_CASE("delta rows render in points") {
    DeltaReport report;
    report.baseline = "original";
    report.rows = {{"original", 0.121, 0.0},
                   {"keywords", 0.090, -0.031},
                   {"none", 0.152, 0.031}};
    CHECK(render_delta_tsv(report) ==
          "original\t12.1\t0.0\n"
          "keywords\t9.0\t-3.1\n"
          "none\t15.2\t3.1\n");

    auto j = nlohmann::json::parse(render_delta_json(report));
    CHECK(j["baseline"] == "original");
    CHECK(j["rows"][1]["variant"] == "keywords");
    CHECK(j["rows"][1]["delta"] == -0.031);
}

TEST_CASE("paired reports render the two-column row") {
    PairedReport report;
    report.standard_metric =
        macro_aggregate("map", std::nullopt, {{"q1", 1.0}});
    report.p_mrr = macro_aggregate("p-mrr", std::nullopt,
                                   {{"q1", 2.0 / 3.0}});
    report.per_doc["q1"] = {{"d2", 1, 3, 2.0 / 3.0}};

    CHECK(render_paired_tsv(report, false) ==
          "map\tp-mrr\n"
          "100.0\t66.7\n");

    std::string detailed = render_paired_tsv(report, true);
    CHECK(detailed.find("map\tq1\t1\n") != std::string::npos);
    CHECK(detailed.find("doc-p-mrr\tq1\td2\t1\t3\t") != std::string::npos);
    CHECK(detailed.find("p-mrr\tq1\t0.6666666666666666\n") !=
          std::string::npos);
    CHECK(detailed.find("\n100.0\t66.7\n") != std::string::npos);

    auto j = nlohmann::json::parse(render_paired_json(report));
    CHECK(j["standard"]["aggregate"] == 1.0);
    CHECK(j["p_mrr"]["aggregate"] == doctest::Approx(2.0 / 3.0));
    CHECK(j["per_doc"]["q1"][0]["doc_id"] == "d2");
    CHECK(j["per_doc"]["q1"][0]["rank_new"] == 3);
    CHECK_FALSE(j.contains("warnings"));

    report.warnings.push_back("something to note");
    auto jw = nlohmann::json::parse(render_paired_json(report));
    REQUIRE(jw.contains("warnings"));
    CHECK(jw["warnings"][0] == "something to note");
}

TEST_CASE("filter summaries are plain key-value lines") {
    FilterSummary summary{100, 60, 40, 30, 20};
    CHECK(render_filter_summary(summary) ==
          "input\t100\n"
          "after_verdict\t60\n"
          "output\t40\n"
          "queries_seen\t30\n"
          "queries_kept\t20\n");
}

}  // TEST_SUITE
