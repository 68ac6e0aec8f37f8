#include "ireval/train_filter.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ireval/common.hpp"

namespace ireval {

using nlohmann::json;

std::vector<GeneratedCandidate> load_candidates(std::istream& in) {
    std::vector<GeneratedCandidate> out;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
            continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            throw ParseError("not a JSON object", line_no);
        GeneratedCandidate c;
        for (const char* field : {"query_id", "instruction_text", "doc_text",
                                  "generated_label"}) {
            if (!j.contains(field) || !j[field].is_string())
                throw ParseError(std::string("missing string field ") + field,
                                 line_no);
        }
        c.query_id = j["query_id"].get<std::string>();
        c.instruction_text = j["instruction_text"].get<std::string>();
        c.doc_text = j["doc_text"].get<std::string>();
        const std::string label = j["generated_label"].get<std::string>();
        if (label == "relevant")
            c.label_relevant = true;
        else if (label == "non-relevant")
            c.label_relevant = false;
        else
            throw ParseError("generated_label must be 'relevant' or "
                             "'non-relevant', got '" + label + "'", line_no);
        if (j.contains("scorer_prob")) {
            if (!j["scorer_prob"].is_number())
                throw ParseError("scorer_prob must be a number", line_no);
            const double p = j["scorer_prob"].get<double>();
            if (!(p >= 0.0 && p <= 1.0))
                throw ParseError("scorer_prob must lie in [0,1]", line_no);
            c.scorer_prob = p;
        }
        out.push_back(std::move(c));
    }
    return out;
}

void write_candidates(std::ostream& out,
                      const std::vector<GeneratedCandidate>& candidates) {
    for (const auto& c : candidates) {
        json j;
        j["query_id"] = c.query_id;
        j["instruction_text"] = c.instruction_text;
        j["doc_text"] = c.doc_text;
        j["generated_label"] = c.label_relevant ? "relevant" : "non-relevant";
        if (c.scorer_prob)
            j["scorer_prob"] = *c.scorer_prob;
        out << j.dump() << '\n';
    }
}

void score_candidates(std::vector<GeneratedCandidate>& candidates,
                      Scorer& scorer,
                      const std::map<std::string, std::string>& query_text_by_id) {
    std::vector<ScoreRequest> requests;
    requests.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const auto& c = candidates[i];
        ScoreRequest r;
        r.request_id = "cand#" + std::to_string(i);
        if (auto it = query_text_by_id.find(c.query_id);
            it != query_text_by_id.end())
            r.query_text = it->second;
        r.instruction_text = c.instruction_text;
        r.passage_text = c.doc_text;
        requests.push_back(std::move(r));
    }
    const std::vector<double> scores = scorer.score_batch(requests);
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        if (!(scores[i] >= 0.0 && scores[i] <= 1.0))
            throw std::runtime_error(
                "scorer returned " + format_double(scores[i]) +
                " for candidate " + std::to_string(i) +
                "; verdict filtering needs probabilities in [0,1]");
        candidates[i].scorer_prob = scores[i];
    }
}

std::vector<GeneratedCandidate> filter_by_verdict(
    const std::vector<GeneratedCandidate>& candidates, double threshold) {
    std::vector<GeneratedCandidate> kept;
    for (const auto& c : candidates) {
        if (!c.scorer_prob)
            throw std::runtime_error("candidate for query " + c.query_id +
                                     " has no scorer_prob; score it first");
        const bool predicted_relevant = *c.scorer_prob >= threshold;
        if (predicted_relevant == c.label_relevant)
            kept.push_back(c);
    }
    return kept;
}

namespace {

// Prefer `a` over `b` under (better probability, then doc_text hash asc).
bool better_candidate(const GeneratedCandidate& a, const GeneratedCandidate& b,
                      bool want_high) {
    const double pa = *a.scorer_prob;
    const double pb = *b.scorer_prob;
    if (pa != pb)
        return want_high ? pa > pb : pa < pb;
    return fnv1a64(a.doc_text) < fnv1a64(b.doc_text);
}

}  // namespace

std::vector<GeneratedCandidate> balance_per_query(
    const std::vector<GeneratedCandidate>& candidates) {
    std::map<std::string, std::pair<const GeneratedCandidate*,
                                    const GeneratedCandidate*>> best;
    for (const auto& c : candidates) {
        if (!c.scorer_prob)
            throw std::runtime_error("candidate for query " + c.query_id +
                                     " has no scorer_prob; score it first");
        auto& [rel, nonrel] = best[c.query_id];
        if (c.label_relevant) {
            if (!rel || better_candidate(c, *rel, /*want_high=*/true))
                rel = &c;
        } else {
            if (!nonrel || better_candidate(c, *nonrel, /*want_high=*/false))
                nonrel = &c;
        }
    }
    std::vector<GeneratedCandidate> out;
    for (const auto& [qid, pair] : best) {
        if (!pair.first || !pair.second)
            continue;  // one-sided query: dropped whole
        out.push_back(*pair.first);
        out.push_back(*pair.second);
    }
    return out;
}

FilterSummary summarize_filter(std::size_t input, std::size_t after_verdict,
                               const std::vector<GeneratedCandidate>& input_set,
                               const std::vector<GeneratedCandidate>& output) {
    FilterSummary s;
    s.input = input;
    s.after_verdict = after_verdict;
    s.output = output.size();
    std::set<std::string> seen, kept;
    for (const auto& c : input_set)
        seen.insert(c.query_id);
    for (const auto& c : output)
        kept.insert(c.query_id);
    s.queries_seen = seen.size();
    s.queries_kept = kept.size();
    return s;
}

}  // namespace ireval
