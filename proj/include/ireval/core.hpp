#ifndef IREVAL_CORE_HPP
#define IREVAL_CORE_HPP

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ireval/common.hpp"

namespace ireval {

// A query with the narrative given to assessors (instruction_original),
// the narrowed re-annotation narrative (instruction_modified) and any
// shorter rewrites keyed by name ("keywords", "short", ...).
struct QueryRecord {
    std::string query_id;
    std::string query_text;
    std::string instruction_original;
    std::optional<std::string> instruction_modified;
    std::map<std::string, std::string> variants;

    bool operator==(const QueryRecord&) const = default;
};

struct Judgment {
    std::string query_id;
    std::string doc_id;
    int grade = 0;

    bool operator==(const Judgment&) const = default;
};

// Graded relevance judgments indexed by query then document. An unjudged
// pair is distinct from grade 0: grade() returns nullopt for it.
class Qrels {
public:
    // Throws on duplicate (query_id, doc_id) or negative grade.
    void add(const Judgment& j);

    std::optional<int> grade(const std::string& query_id,
                             const std::string& doc_id) const;

    bool has_query(const std::string& query_id) const;

    // Count of grade > 0 judgments for the query (0 if unknown query).
    std::size_t relevant_count(const std::string& query_id) const;

    const std::map<std::string, std::map<std::string, int>>& by_query() const {
        return by_query_;
    }

    std::size_t size() const { return size_; }
    bool empty() const { return size_ == 0; }

    bool operator==(const Qrels& other) const {
        return by_query_ == other.by_query_;
    }

private:
    std::map<std::string, std::map<std::string, int>> by_query_;
    std::size_t size_ = 0;
};

// One row of a TREC run. `iteration` is the historical second column,
// preserved verbatim on parse (almost always "Q0").
struct RunEntry {
    std::string query_id;
    std::string iteration = "Q0";
    std::string doc_id;
    int rank = 1;
    double score = 0.0;
    std::string tag;

    bool operator==(const RunEntry&) const = default;
};

// Canonical ordering for ranked lists: descending score, ascending doc id.
bool ranks_before(double score_a, const std::string& doc_a, double score_b,
                  const std::string& doc_b);

// Ranked lists grouped by query. Groups keep first-appearance order for
// serialization; within a group entries are ordered by rank 1..n.
class Run {
public:
    // Entries must all carry `query_id`, ranks 1..n without gaps, scores
    // non-increasing with rank, doc ids unique. Throws otherwise.
    void add_group(const std::string& query_id, std::vector<RunEntry> entries);

    bool has_query(const std::string& query_id) const;
    const std::vector<RunEntry>* group(const std::string& query_id) const;
    const std::vector<std::string>& query_order() const { return query_order_; }

    std::optional<int> rank_of(const std::string& query_id,
                               const std::string& doc_id) const;
    std::set<std::string> doc_set(const std::string& query_id) const;

    // Doc ids of a group in rank order.
    std::vector<std::string> ranking(const std::string& query_id) const;

    std::size_t query_count() const { return query_order_.size(); }
    bool empty() const { return query_order_.empty(); }

    bool operator==(const Run& other) const {
        return query_order_ == other.query_order_ && groups_ == other.groups_;
    }

private:
    std::vector<std::string> query_order_;
    std::map<std::string, std::vector<RunEntry>> groups_;
};

struct RunParse {
    Run run;
    // One note per query whose declared ranks disagreed with its scores
    // and were re-derived.
    std::vector<std::string> warnings;
};

// TREC run format: qid iteration docid rank score tag. Lines with a wrong
// field count or non-numeric rank/score raise ParseError with the line
// number. Declared ranks that are not a 1..n permutation consistent with
// non-increasing scores are re-derived from the scores (descending, doc id
// ascending on ties) and reported in `warnings`.
RunParse parse_run(std::istream& in);
void write_run(std::ostream& out, const Run& run);

// TREC qrels format: qid iteration docid grade. Duplicate (qid, docid)
// pairs and negative grades raise ParseError.
Qrels parse_qrels(std::istream& in);
void write_qrels(std::ostream& out, const Qrels& qrels);

// Dataset records, one JSON object per line with fields query_id, text,
// instruction, instruction_modified?, variants?.
std::vector<QueryRecord> load_dataset(std::istream& in);
void write_dataset(std::ostream& out, const std::vector<QueryRecord>& records);

struct PairingViolation {
    std::string query_id;
    std::string doc_id;
    int grade_original = 0;
    int grade_modified = 0;

    bool operator==(const PairingViolation&) const = default;
};

struct PairingReport {
    // Dataset queries without a modified instruction.
    std::vector<std::string> queries_missing_modified_instruction;
    // Dataset queries with no judgments in the modified qrels.
    std::vector<std::string> queries_missing_modified_qrels;
    // Documents judged non-relevant originally that gained relevance under
    // the modified instruction; the benchmark construction forbids this.
    std::vector<PairingViolation> violations;

    bool clean() const {
        return queries_missing_modified_instruction.empty() &&
               queries_missing_modified_qrels.empty() && violations.empty();
    }
};

PairingReport validate_pairing(const std::vector<QueryRecord>& dataset,
                               const Qrels& qrels_original,
                               const Qrels& qrels_modified);

}  // namespace ireval

#endif
