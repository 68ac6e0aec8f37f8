// Test double for the scorer bridge protocol. Reads one JSON record per
// line on stdin, answers score requests on stdout. The --mode flag selects
// well-behaved and misbehaving personalities so the bridge's error paths
// can be driven end to end.

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

namespace {

using nlohmann::json;

std::set<std::string> word_set(const std::string& text) {
    std::set<std::string> words;
    std::string current;
    for (char c : text) {
        if (std::isalnum(static_cast<unsigned char>(c))) {
            current += static_cast<char>(
                std::tolower(static_cast<unsigned char>(c)));
        } else if (!current.empty()) {
            words.insert(current);
            current.clear();
        }
    }
    if (!current.empty())
        words.insert(current);
    return words;
}

// Deterministic content-driven relevance: query/instruction term overlap
// with the passage, slightly length-normalized so ties are rare.
double overlap_score(const json& request) {
    const auto query = word_set(request.value("query_text", "") + " " +
                                request.value("instruction_text", ""));
    const auto passage = word_set(request.value("passage_text", ""));
    std::size_t hits = 0;
    for (const auto& w : query)
        if (passage.count(w))
            ++hits;
    return static_cast<double>(hits) +
           1.0 / (2.0 + static_cast<double>(passage.size()));
}

struct Options {
    std::string mode = "score";
    double value = 1.0;   // for --mode const
    int after = 3;        // for --mode die
};

class Stub {
public:
    explicit Stub(Options options) : options_(std::move(options)) {}

    int run() {
        std::string line;
        while (std::getline(std::cin, line)) {
            if (line.empty())
                continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object())
                continue;
            const std::string type = j.value("type", "");
            if (type == "score") {
                pending_.push_back(std::move(j));
            } else if (type == "flush") {
                answer_batch();
            } else if (type == "end") {
                return 0;
            }
        }
        return 0;
    }

private:
    void answer_batch() {
        std::vector<json> batch;
        batch.swap(pending_);
        if (options_.mode == "shuffle")
            std::reverse(batch.begin(), batch.end());
        for (const auto& request : batch) {
            if (options_.mode == "silent")
                continue;
            answer(request);
            if (options_.mode == "die" && answered_ >= options_.after)
                std::exit(0);
        }
        std::cout.flush();
    }

    void answer(const json& request) {
        const std::string id = request.value("request_id", "");
        json response;
        response["request_id"] = id;

        if (options_.mode == "malformed-once" && !spoiled_one_) {
            spoiled_one_ = true;
            response["score"] = "oops";
            emit(response);
            return;
        }
        if (options_.mode == "unknown-id" && answered_ == 0) {
            response["request_id"] = "no-such-request";
            response["score"] = 1.0;
            emit(response);
            ++answered_;
            return;
        }

        if (options_.mode == "logits") {
            response["logit_true"] = overlap_score(request);
            response["logit_false"] = 1.0;
        } else if (options_.mode == "const") {
            response["score"] = options_.value;
        } else {
            response["score"] = overlap_score(request);
        }
        emit(response);
        ++answered_;
        if (options_.mode == "duplicate" && answered_ == 1)
            emit(response);
    }

    void emit(const json& response) {
        std::cout << response.dump() << '\n';
        std::cout.flush();
    }

    Options options_;
    std::vector<json> pending_;
    int answered_ = 0;
    bool spoiled_one_ = false;
};

}  // namespace

int main(int argc, char** argv) {
    Options options;
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        auto next = [&]() -> std::string {
            if (i + 1 >= argc) {
                std::cerr << "stub_scorer: " << arg << " needs a value\n";
                std::exit(64);
            }
            return argv[++i];
        };
        if (arg == "--mode") {
            options.mode = next();
        } else if (arg == "--value") {
            options.value = std::stod(next());
        } else if (arg == "--after") {
            options.after = std::stoi(next());
        } else {
            std::cerr << "stub_scorer: unknown flag " << arg << '\n';
            return 64;
        }
    }
    return Stub(std::move(options)).run();
}
