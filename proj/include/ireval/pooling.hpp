#ifndef IREVAL_POOLING_HPP
#define IREVAL_POOLING_HPP

#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ireval/core.hpp"

namespace ireval {

enum class PoolStatus { Relevant, JudgedNonRelevant, Unjudged };

struct PoolEntry {
    std::string doc_id;
    // "relevant" for seeded judgments, else the contributing run's tag.
    std::string source;
    PoolStatus status = PoolStatus::Relevant;

    bool operator==(const PoolEntry&) const = default;
};

// Fixed reranking candidate set for one query: every relevant-judged
// document plus run-contributed non-relevant documents, insertion-ordered.
struct Pool {
    std::string query_id;
    std::vector<PoolEntry> entries;

    bool contains(const std::string& doc_id) const;
    std::set<std::string> doc_ids() const;

    bool operator==(const Pool&) const = default;
};

// Seeds each query's pool with all grade > 0 documents, then cycles over
// the runs in the given order; each turn a run contributes its next
// highest-ranked document that is neither pooled nor relevant-judged.
// Stops at max_size or when every run is exhausted. Queries are the union
// of qrels queries and run queries. Throws when runs is empty or a query
// has more relevant documents than max_size.
std::map<std::string, Pool> build_pool(const Qrels& qrels,
                                       const std::vector<Run>& runs,
                                       std::size_t max_size = 100);

// One line per pooled document: query_id, doc_id, source, status.
void write_pools(std::ostream& out, const std::map<std::string, Pool>& pools);

// Accepts the 4-column form above; a 3-column line (query_id, doc_id,
// source) is read as judged non-relevant unless source is "relevant".
std::map<std::string, Pool> parse_pools(std::istream& in);

}  // namespace ireval

#endif
