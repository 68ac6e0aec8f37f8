#include "ireval/core.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <unordered_map>

#include <json.hpp>

namespace ireval {

void Qrels::add(const Judgment& j) {
    if (j.grade < 0) {
        throw std::invalid_argument("negative grade for (" + j.query_id + ", " +
                                    j.doc_id + ")");
    }
    auto& docs = by_query_[j.query_id];
    auto [it, inserted] = docs.emplace(j.doc_id, j.grade);
    if (!inserted) {
        throw std::invalid_argument("duplicate judgment for (" + j.query_id +
                                    ", " + j.doc_id + ")");
    }
    ++size_;
}

std::optional<int> Qrels::grade(const std::string& query_id,
                                const std::string& doc_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return std::nullopt;
    auto d = q->second.find(doc_id);
    if (d == q->second.end()) return std::nullopt;
    return d->second;
}

bool Qrels::has_query(const std::string& query_id) const {
    return by_query_.count(query_id) != 0;
}

std::size_t Qrels::relevant_count(const std::string& query_id) const {
    auto q = by_query_.find(query_id);
    if (q == by_query_.end()) return 0;
    std::size_t n = 0;
    for (const auto& [doc, grade] : q->second)
        if (grade > 0) ++n;
    return n;
}

bool ranks_before(double score_a, const std::string& doc_a, double score_b,
                  const std::string& doc_b) {
    if (score_a != score_b) return score_a > score_b;
    return doc_a < doc_b;
}

void Run::add_group(const std::string& query_id, std::vector<RunEntry> entries) {
    if (entries.empty()) {
        throw std::invalid_argument("empty run group for query " + query_id);
    }
    if (groups_.count(query_id)) {
        throw std::invalid_argument("run group for query " + query_id +
                                    " added twice");
    }
    std::sort(entries.begin(), entries.end(),
              [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    std::set<std::string> seen;
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const RunEntry& e = entries[i];
        if (e.query_id != query_id) {
            throw std::invalid_argument("entry for query " + e.query_id +
                                        " in group " + query_id);
        }
        if (e.rank != static_cast<int>(i) + 1) {
            throw std::invalid_argument("ranks for query " + query_id +
                                        " are not 1..n without gaps");
        }
        if (i > 0 && entries[i - 1].score < e.score) {
            throw std::invalid_argument("scores increase with rank for query " +
                                        query_id);
        }
        if (!seen.insert(e.doc_id).second) {
            throw std::invalid_argument("duplicate document " + e.doc_id +
                                        " for query " + query_id);
        }
    }
    query_order_.push_back(query_id);
    groups_.emplace(query_id, std::move(entries));
}

bool Run::has_query(const std::string& query_id) const {
    return groups_.count(query_id) != 0;
}

const std::vector<RunEntry>* Run::group(const std::string& query_id) const {
    auto it = groups_.find(query_id);
    return it == groups_.end() ? nullptr : &it->second;
}

std::optional<int> Run::rank_of(const std::string& query_id,
                                const std::string& doc_id) const {
    const auto* g = group(query_id);
    if (!g) return std::nullopt;
    for (const RunEntry& e : *g)
        if (e.doc_id == doc_id) return e.rank;
    return std::nullopt;
}

std::set<std::string> Run::doc_set(const std::string& query_id) const {
    std::set<std::string> docs;
    if (const auto* g = group(query_id))
        for (const RunEntry& e : *g) docs.insert(e.doc_id);
    return docs;
}

std::vector<std::string> Run::ranking(const std::string& query_id) const {
    std::vector<std::string> docs;
    if (const auto* g = group(query_id)) {
        docs.reserve(g->size());
        for (const RunEntry& e : *g) docs.push_back(e.doc_id);
    }
    return docs;
}

namespace {

// Declared ranks are kept when they form a 1..n permutation whose order
// has non-increasing scores; anything else is re-derived from the scores.
bool declared_ranks_consistent(std::vector<RunEntry>& entries) {
    const std::size_t n = entries.size();
    std::vector<char> present(n, 0);
    for (const RunEntry& e : entries) {
        if (e.rank < 1 || e.rank > static_cast<int>(n)) return false;
        if (present[static_cast<std::size_t>(e.rank) - 1]) return false;
        present[static_cast<std::size_t>(e.rank) - 1] = 1;
    }
    std::sort(entries.begin(), entries.end(),
              [](const RunEntry& a, const RunEntry& b) { return a.rank < b.rank; });
    for (std::size_t i = 1; i < n; ++i)
        if (entries[i - 1].score < entries[i].score) return false;
    return true;
}

void rederive_ranks(std::vector<RunEntry>& entries) {
    std::sort(entries.begin(), entries.end(),
              [](const RunEntry& a, const RunEntry& b) {
                  return ranks_before(a.score, a.doc_id, b.score, b.doc_id);
              });
    for (std::size_t i = 0; i < entries.size(); ++i)
        entries[i].rank = static_cast<int>(i) + 1;
}

}  // namespace

RunParse parse_run(std::istream& in) {
    std::vector<std::string> query_order;
    std::unordered_map<std::string, std::vector<RunEntry>> groups;
    // (query, doc) -> line, for duplicate diagnostics
    std::unordered_map<std::string, std::size_t> first_line;

    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() != 6) {
            throw ParseError("expected 6 fields (qid iter docid rank score tag), got " +
                                 std::to_string(f.size()),
                             lineno);
        }
        long long rank;
        if (!parse_int(f[3], &rank)) {
            throw ParseError("non-numeric rank '" + f[3] + "'", lineno);
        }
        double score;
        if (!parse_double(f[4], &score)) {
            throw ParseError("non-numeric score '" + f[4] + "'", lineno);
        }
        std::string key = f[0] + '\x1f' + f[2];
        auto [it, inserted] = first_line.emplace(std::move(key), lineno);
        if (!inserted) {
            throw ParseError("duplicate document " + f[2] + " for query " + f[0] +
                                 " (first on line " + std::to_string(it->second) + ")",
                             lineno);
        }
        if (!groups.count(f[0])) query_order.push_back(f[0]);
        groups[f[0]].push_back(RunEntry{f[0], f[1], f[2], static_cast<int>(rank),
                                        score, f[5]});
    }

    RunParse out;
    for (const std::string& qid : query_order) {
        std::vector<RunEntry>& entries = groups[qid];
        if (!declared_ranks_consistent(entries)) {
            rederive_ranks(entries);
            out.warnings.push_back("query " + qid +
                                   ": declared ranks inconsistent with scores; "
                                   "re-derived from score order");
        }
        out.run.add_group(qid, std::move(entries));
    }
    return out;
}

void write_run(std::ostream& out, const Run& run) {
    for (const std::string& qid : run.query_order()) {
        for (const RunEntry& e : *run.group(qid)) {
            out << e.query_id << ' ' << e.iteration << ' ' << e.doc_id << ' '
                << e.rank << ' ' << format_double(e.score) << ' ' << e.tag
                << '\n';
        }
    }
}

Qrels parse_qrels(std::istream& in) {
    Qrels qrels;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::vector<std::string> f = split_fields(line);
        if (f.empty()) continue;
        if (f.size() != 4) {
            throw ParseError("expected 4 fields (qid iter docid grade), got " +
                                 std::to_string(f.size()),
                             lineno);
        }
        long long grade;
        if (!parse_int(f[3], &grade)) {
            throw ParseError("non-numeric grade '" + f[3] + "'", lineno);
        }
        if (grade < 0) {
            throw ParseError("negative grade for (" + f[0] + ", " + f[2] + ")",
                             lineno);
        }
        std::string key = f[0] + '\x1f' + f[2];
        auto [it, inserted] = first_line.emplace(std::move(key), lineno);
        if (!inserted) {
            throw ParseError("duplicate judgment for (" + f[0] + ", " + f[2] +
                                 "), first on line " + std::to_string(it->second),
                             lineno);
        }
        qrels.add(Judgment{f[0], f[2], static_cast<int>(grade)});
    }
    return qrels;
}

void write_qrels(std::ostream& out, const Qrels& qrels) {
    for (const auto& [qid, docs] : qrels.by_query())
        for (const auto& [doc, grade] : docs)
            out << qid << " 0 " << doc << ' ' << grade << '\n';
}

std::vector<QueryRecord> load_dataset(std::istream& in) {
    std::vector<QueryRecord> records;
    std::set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        bool blank = true;
        for (char c : line)
            if (!std::isspace(static_cast<unsigned char>(c))) blank = false;
        if (blank) continue;

        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid record: ") + e.what(), lineno);
        }
        if (!obj.is_object()) throw ParseError("record is not an object", lineno);

        QueryRecord rec;
        if (!obj.contains("query_id") || !obj["query_id"].is_string() ||
            obj["query_id"].get<std::string>().empty()) {
            throw ParseError("missing query_id", lineno);
        }
        rec.query_id = obj["query_id"].get<std::string>();
        if (!obj.contains("text") || !obj["text"].is_string()) {
            throw ParseError("missing text for query " + rec.query_id, lineno);
        }
        rec.query_text = obj["text"].get<std::string>();
        if (obj.contains("instruction")) {
            rec.instruction_original = obj["instruction"].get<std::string>();
        }
        if (obj.contains("instruction_modified")) {
            rec.instruction_modified = obj["instruction_modified"].get<std::string>();
        }
        if (obj.contains("variants")) {
            if (!obj["variants"].is_object()) {
                throw ParseError("variants must be an object for query " + rec.query_id,
                                 lineno);
            }
            for (auto& [name, value] : obj["variants"].items()) {
                rec.variants[name] = value.get<std::string>();
            }
        }
        if (!seen.insert(rec.query_id).second) {
            throw ParseError("duplicate query_id " + rec.query_id, lineno);
        }
        records.push_back(std::move(rec));
    }
    return records;
}

void write_dataset(std::ostream& out, const std::vector<QueryRecord>& records) {
    for (const QueryRecord& rec : records) {
        nlohmann::json obj;
        obj["query_id"] = rec.query_id;
        obj["text"] = rec.query_text;
        if (!rec.instruction_original.empty())
            obj["instruction"] = rec.instruction_original;
        if (rec.instruction_modified)
            obj["instruction_modified"] = *rec.instruction_modified;
        if (!rec.variants.empty()) obj["variants"] = rec.variants;
        out << obj.dump() << '\n';
    }
}

PairingReport validate_pairing(const std::vector<QueryRecord>& dataset,
                               const Qrels& qrels_original,
                               const Qrels& qrels_modified) {
    PairingReport report;
    for (const QueryRecord& rec : dataset) {
        if (!rec.instruction_modified) {
            report.queries_missing_modified_instruction.push_back(rec.query_id);
        }
        if (!qrels_modified.has_query(rec.query_id)) {
            report.queries_missing_modified_qrels.push_back(rec.query_id);
        }
    }
    for (const auto& [qid, docs] : qrels_modified.by_query()) {
        for (const auto& [doc, grade_new] : docs) {
            if (grade_new <= 0) continue;
            std::optional<int> grade_og = qrels_original.grade(qid, doc);
            if (grade_og && *grade_og == 0) {
                report.violations.push_back(PairingViolation{qid, doc, 0, grade_new});
            }
        }
    }
    return report;
}

}  // namespace ireval
