#include "ireval/fixtures.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "ireval/bm25.hpp"
#include "ireval/common.hpp"

namespace ireval {

namespace {

constexpr int kVocabulary = 300;

// mt19937_64 has a fully specified sequence; combined with modulo draws the
// fixture family is bit-identical everywhere (std distributions are not).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    std::size_t below(std::size_t n) {
        return static_cast<std::size_t>(next() % n);
    }

    double unit() {  // [0, 1) with millesimal resolution, prints compactly
        return static_cast<double>(below(1000)) / 1000.0;
    }

private:
    std::mt19937_64 engine_;
};

std::string pad3(int n) {
    std::string s = std::to_string(n);
    while (s.size() < 3)
        s.insert(s.begin(), '0');
    return s;
}

std::string word(std::size_t index) {
    return "w" + pad3(static_cast<int>(index % kVocabulary));
}

std::string join(const std::vector<std::string>& words) {
    std::string out;
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (i) out += ' ';
        out += words[i];
    }
    return out;
}

// Pseudo-random but input-determined score, so contributing runs do not
// depend on generation order.
double hash_score(const std::string& tag, const std::string& doc_id) {
    const std::uint64_t h = fnv1a64(tag + "|" + doc_id);
    return static_cast<double>(h >> 11) * 0x1.0p-53;
}

}  // namespace

FixtureSet generate_fixtures(const FixtureOptions& opt) {
    if (opt.queries < 1)
        throw UsageError("fixtures: need at least one query");
    if (opt.relevant_per_query < 1)
        throw UsageError("fixtures: need at least one relevant doc per query");
    if (opt.changed_per_query < 0 ||
        opt.changed_per_query > opt.relevant_per_query)
        throw UsageError("fixtures: changed docs must fit within relevant docs");
    if (opt.docs_per_query <
        opt.relevant_per_query + opt.judged_nonrelevant ||
        opt.judged_nonrelevant < 0)
        throw UsageError("fixtures: docs per query must cover relevant and "
                         "judged non-relevant counts");
    if (opt.min_doc_words < 5 || opt.max_doc_words < opt.min_doc_words)
        throw UsageError("fixtures: bad document length range");
    if (opt.variant_count < 0 || opt.candidates_per_query < 0)
        throw UsageError("fixtures: negative counts");

    Rng rng(opt.seed);
    FixtureSet out;

    for (int qi = 0; qi < opt.queries; ++qi) {
        QueryRecord query;
        query.query_id = "q" + pad3(qi + 1);

        std::vector<std::string> query_words;
        std::set<std::size_t> used;
        while (query_words.size() < 3) {
            const std::size_t w = rng.below(kVocabulary);
            if (used.insert(w).second)
                query_words.push_back(word(w));
        }
        query.query_text = join(query_words);

        std::vector<std::string> instruction_words;
        const std::size_t instruction_len = 10 + rng.below(6);
        for (std::size_t i = 0; i < instruction_len; ++i) {
            if (rng.below(100) < 25)
                instruction_words.push_back(query_words[rng.below(3)]);
            else
                instruction_words.push_back(word(rng.below(kVocabulary)));
        }
        query.instruction_original = join(instruction_words);

        const bool annotated = qi % 2 == 0;
        if (annotated) {
            std::vector<std::string> narrowed = instruction_words;
            narrowed.push_back("excluding");
            for (int i = 0; i < 3; ++i)
                narrowed.push_back(word(rng.below(kVocabulary)));
            query.instruction_modified = join(narrowed);
        }

        for (int v = 1; v <= opt.variant_count; ++v) {
            std::vector<std::string> paraphrase;
            const std::size_t len = 6 + rng.below(4);
            for (std::size_t i = 0; i < len; ++i) {
                if (rng.below(100) < 50)
                    paraphrase.push_back(
                        instruction_words[rng.below(instruction_words.size())]);
                else
                    paraphrase.push_back(word(rng.below(kVocabulary)));
            }
            query.variants.emplace("v" + std::to_string(v), join(paraphrase));
        }

        // Documents: topical for the relevant prefix, noise elsewhere.
        std::vector<std::string> doc_ids;
        for (int dj = 0; dj < opt.docs_per_query; ++dj) {
            const std::string doc_id =
                query.query_id + "_d" + pad3(dj + 1);
            doc_ids.push_back(doc_id);
            const bool relevant = dj < opt.relevant_per_query;
            const std::size_t doc_len =
                static_cast<std::size_t>(opt.min_doc_words) +
                rng.below(static_cast<std::size_t>(opt.max_doc_words -
                                                   opt.min_doc_words + 1));
            std::vector<std::string> words;
            words.reserve(doc_len);
            for (std::size_t i = 0; i < doc_len; ++i) {
                const std::size_t topical_chance = relevant ? 30 : 4;
                if (rng.below(100) < topical_chance) {
                    if (rng.below(2) == 0)
                        words.push_back(query_words[rng.below(3)]);
                    else
                        words.push_back(
                            instruction_words[rng.below(instruction_words.size())]);
                } else {
                    words.push_back(word(rng.below(kVocabulary)));
                }
            }
            out.documents.push_back({doc_id, join(words)});

            const bool changed = dj < opt.changed_per_query;
            if (relevant) {
                const int grade = dj == 0 ? 2 : 1;
                out.qrels_original.add({query.query_id, doc_id, grade});
                if (annotated) {
                    if (changed) {
                        // Exercise both framings of removed relevance: an
                        // explicit 0 and a dropped judgment.
                        if (dj % 2 == 0)
                            out.qrels_modified.add({query.query_id, doc_id, 0});
                    } else {
                        out.qrels_modified.add({query.query_id, doc_id, grade});
                    }
                }
            } else if (dj < opt.relevant_per_query + opt.judged_nonrelevant) {
                out.qrels_original.add({query.query_id, doc_id, 0});
                if (annotated)
                    out.qrels_modified.add({query.query_id, doc_id, 0});
            }
        }

        for (int c = 0; c < opt.candidates_per_query; ++c) {
            GeneratedCandidate cand;
            cand.query_id = query.query_id;
            cand.instruction_text = query.instruction_original;
            cand.label_relevant = c % 2 == 0;
            std::vector<std::string> words;
            const std::size_t len = 12 + rng.below(9);
            for (std::size_t i = 0; i < len; ++i)
                words.push_back(word(rng.below(kVocabulary)));
            cand.doc_text = join(words);
            cand.scorer_prob = rng.unit();
            out.candidates.push_back(std::move(cand));
        }

        out.dataset.push_back(std::move(query));
    }

    // Two pooling contributors ranking every candidate document.
    for (const char* tag : {"contrib1", "contrib2"}) {
        Run run;
        for (const auto& query : out.dataset) {
            std::vector<std::pair<std::string, double>> doc_scores;
            for (const auto& doc : out.documents) {
                if (doc.doc_id.compare(0, query.query_id.size() + 1,
                                       query.query_id + "_") == 0)
                    doc_scores.emplace_back(doc.doc_id,
                                            hash_score(tag, doc.doc_id));
            }
            run.add_group(query.query_id,
                          rank_doc_scores(query.query_id, doc_scores, tag));
        }
        out.contributing_runs.push_back(std::move(run));
    }
    return out;
}

}  // namespace ireval
