#include "ireval/pooling.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include "ireval/common.hpp"

namespace ireval {

bool Pool::contains(const std::string& doc_id) const {
    for (const auto& e : entries)
        if (e.doc_id == doc_id) return true;
    return false;
}

std::set<std::string> Pool::doc_ids() const {
    std::set<std::string> out;
    for (const auto& e : entries)
        out.insert(e.doc_id);
    return out;
}

namespace {

const char* status_name(PoolStatus status) {
    switch (status) {
        case PoolStatus::Relevant: return "relevant";
        case PoolStatus::JudgedNonRelevant: return "judged";
        case PoolStatus::Unjudged: return "unjudged";
    }
    return "unjudged";
}

}  // namespace

std::map<std::string, Pool> build_pool(const Qrels& qrels,
                                       const std::vector<Run>& runs,
                                       std::size_t max_size) {
    if (runs.empty())
        throw std::invalid_argument("build_pool: no contributing runs");

    std::set<std::string> query_ids;
    for (const auto& [qid, docs] : qrels.by_query())
        query_ids.insert(qid);
    for (const auto& run : runs)
        for (const auto& qid : run.query_order())
            query_ids.insert(qid);

    std::map<std::string, Pool> pools;
    for (const auto& qid : query_ids) {
        Pool pool;
        pool.query_id = qid;
        std::unordered_set<std::string> pooled;
        std::unordered_set<std::string> relevant;

        if (auto it = qrels.by_query().find(qid); it != qrels.by_query().end()) {
            for (const auto& [doc_id, grade] : it->second) {
                if (grade <= 0)
                    continue;
                relevant.insert(doc_id);
                pooled.insert(doc_id);
                pool.entries.push_back({doc_id, "relevant", PoolStatus::Relevant});
            }
        }
        if (pool.entries.size() > max_size)
            throw std::runtime_error(
                "build_pool: query " + qid + " has " +
                std::to_string(pool.entries.size()) +
                " relevant documents, above the pool maximum " +
                std::to_string(max_size));

        // One cursor per run, advanced past ineligible documents lazily.
        std::vector<std::size_t> cursor(runs.size(), 0);
        bool any_left = true;
        while (pool.entries.size() < max_size && any_left) {
            any_left = false;
            for (std::size_t r = 0;
                 r < runs.size() && pool.entries.size() < max_size; ++r) {
                const std::vector<RunEntry>* group = runs[r].group(qid);
                if (!group)
                    continue;
                std::size_t& pos = cursor[r];
                while (pos < group->size()) {
                    const RunEntry& entry = (*group)[pos];
                    ++pos;
                    if (pooled.count(entry.doc_id) || relevant.count(entry.doc_id))
                        continue;
                    pooled.insert(entry.doc_id);
                    const bool judged = qrels.grade(qid, entry.doc_id).has_value();
                    pool.entries.push_back(
                        {entry.doc_id,
                         entry.tag.empty() ? "run" + std::to_string(r + 1)
                                           : entry.tag,
                         judged ? PoolStatus::JudgedNonRelevant
                                : PoolStatus::Unjudged});
                    break;
                }
                if (pos < group->size())
                    any_left = true;
            }
        }
        pools.emplace(qid, std::move(pool));
    }
    return pools;
}

void write_pools(std::ostream& out, const std::map<std::string, Pool>& pools) {
    for (const auto& [qid, pool] : pools)
        for (const auto& e : pool.entries)
            out << qid << ' ' << e.doc_id << ' ' << e.source << ' '
                << status_name(e.status) << '\n';
}

std::map<std::string, Pool> parse_pools(std::istream& in) {
    std::map<std::string, Pool> pools;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty())
            continue;
        if (fields.size() != 3 && fields.size() != 4)
            throw ParseError("expected 3 or 4 fields (query_id doc_id source "
                             "[status]), got " + std::to_string(fields.size()),
                             line_no);
        PoolEntry entry;
        entry.doc_id = fields[1];
        entry.source = fields[2];
        if (fields.size() == 4) {
            if (fields[3] == "relevant")
                entry.status = PoolStatus::Relevant;
            else if (fields[3] == "judged")
                entry.status = PoolStatus::JudgedNonRelevant;
            else if (fields[3] == "unjudged")
                entry.status = PoolStatus::Unjudged;
            else
                throw ParseError("unknown pool status: " + fields[3], line_no);
        } else {
            entry.status = entry.source == "relevant"
                               ? PoolStatus::Relevant
                               : PoolStatus::JudgedNonRelevant;
        }
        auto [it, inserted] = pools.try_emplace(fields[0]);
        if (inserted)
            it->second.query_id = fields[0];
        if (it->second.contains(entry.doc_id))
            throw ParseError("duplicate pooled document " + entry.doc_id +
                             " for query " + fields[0], line_no);
        it->second.entries.push_back(std::move(entry));
    }
    return pools;
}

}  // namespace ireval
