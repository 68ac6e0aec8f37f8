#ifndef IREVAL_BRIDGE_HPP
#define IREVAL_BRIDGE_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "ireval/bm25.hpp"
#include "ireval/core.hpp"
#include "ireval/pooling.hpp"
#include "ireval/textproc.hpp"

namespace ireval {

struct ScoreRequest {
    std::string request_id;
    std::string query_text;
    std::string instruction_text;  // empty for the no-instruction ablation
    std::string passage_text;
};

// Relevance probability from a true/false logit pair, MonoT5 style:
// exp(lt) / (exp(lt) + exp(lf)) evaluated stably. Throws on non-finite input.
double logitpair_to_score(double logit_true, double logit_false);

// Content hash identifying a request in replay files; independent of
// request_id so replays survive pool reordering.
std::string request_key(const std::string& query_text,
                        const std::string& instruction_text,
                        const std::string& passage_text);

// The query text a lexical scorer sees: query plus instruction when present.
std::string join_query_instruction(const std::string& query_text,
                                   const std::string& instruction_text);

// A scoring endpoint. score_batch answers requests positionally; it throws
// on any protocol or lookup failure.
class Scorer {
public:
    virtual ~Scorer() = default;
    virtual std::vector<double> score_batch(
        const std::vector<ScoreRequest>& requests) = 0;
    // True when score_batch is safe to call from several threads at once.
    virtual bool thread_safe() const { return false; }
};

// Built-in lexical endpoint; equivalent by construction to rank_pool over
// the same collection statistics.
class Bm25Scorer : public Scorer {
public:
    Bm25Scorer(CollectionStats stats, Bm25Params params = {});
    std::vector<double> score_batch(
        const std::vector<ScoreRequest>& requests) override;
    bool thread_safe() const override { return true; }

private:
    CollectionStats stats_;
    Bm25Params params_;
};

// Precomputed scores keyed by request_key; lines of "<key> <score>".
// Lets CI rerun neural rankings without the model.
class ReplayScorer : public Scorer {
public:
    explicit ReplayScorer(std::istream& in);
    std::vector<double> score_batch(
        const std::vector<ScoreRequest>& requests) override;
    bool thread_safe() const override { return true; }

    std::size_t size() const { return scores_.size(); }

private:
    std::unordered_map<std::string, double> scores_;
};

// Wraps another scorer and captures (request_key, score) pairs so a live
// session can be saved as a replay file.
class RecordingScorer : public Scorer {
public:
    explicit RecordingScorer(Scorer& inner);
    std::vector<double> score_batch(
        const std::vector<ScoreRequest>& requests) override;
    void save(std::ostream& out) const;

private:
    Scorer& inner_;
    std::map<std::string, double> recorded_;
};

struct BridgeOptions {
    std::string command;            // run through /bin/sh -c
    double timeout_seconds = 60.0;  // inactivity limit while awaiting replies
};

// Line-delimited protocol over a child process's standard streams.
//
//   parent -> child   {"type":"score","request_id":...,"query_text":...,
//                      "instruction_text":...,"passage_text":...}
//                     {"type":"flush"}   after each batch
//                     {"type":"end"}     once, then stdin closes
//   child  -> parent  {"request_id":...,"score":N}
//                 or  {"request_id":...,"logit_true":N,"logit_false":N}
//
// Responses may arrive in any order within a batch; each request_id must be
// answered exactly once. A malformed response naming a known request_id is
// retried once; duplicates, unknown ids, unparseable lines, early exit, and
// inactivity past the timeout are errors carrying a partial-progress note.
class ProcessScorer : public Scorer {
public:
    explicit ProcessScorer(BridgeOptions options);
    ~ProcessScorer() override;

    ProcessScorer(const ProcessScorer&) = delete;
    ProcessScorer& operator=(const ProcessScorer&) = delete;

    std::vector<double> score_batch(
        const std::vector<ScoreRequest>& requests) override;

    // Sends the end-of-stream marker and reaps the child. Called by the
    // destructor if not called explicitly; explicit calls surface errors.
    void finish();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

// Picks the instruction text a variant name selects from a query record:
// "none" (empty), "original", "modified", or a key of `variants`. Throws
// UsageError when the record lacks the requested variant.
std::string instruction_for(const QueryRecord& query,
                            const std::string& variant);

// Scores every pooled document's passages for each query, aggregates to
// document scores with MaxP, and assembles a Run ordered by query id.
// `threads` splits queries across scorer calls only when the scorer is
// thread-safe; the output never depends on it.
Run rerank_pools(const std::map<std::string, Pool>& pools,
                 const std::vector<QueryRecord>& queries,
                 const std::string& variant,
                 const std::vector<Passage>& corpus, Scorer& scorer,
                 const std::string& tag, int threads = 1);

}  // namespace ireval

#endif
