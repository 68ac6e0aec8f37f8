#include "ireval/bridge.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <deque>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <unordered_set>

#include <json.hpp>

#include "ireval/common.hpp"

namespace ireval {

double logitpair_to_score(double logit_true, double logit_false) {
    if (!std::isfinite(logit_true) || !std::isfinite(logit_false))
        throw std::invalid_argument("logitpair_to_score: non-finite logit");
    const double m = std::max(logit_true, logit_false);
    const double et = std::exp(logit_true - m);
    const double ef = std::exp(logit_false - m);
    return et / (et + ef);
}

std::string request_key(const std::string& query_text,
                        const std::string& instruction_text,
                        const std::string& passage_text) {
    std::uint64_t h = 1469598103934665603ULL;
    auto fold = [&h](std::string_view s) {
        for (unsigned char c : s) {
            h ^= c;
            h *= 1099511628211ULL;
        }
    };
    fold(query_text);
    fold("\x1f");
    fold(instruction_text);
    fold("\x1f");
    fold(passage_text);
    return to_hex(h);
}

std::string join_query_instruction(const std::string& query_text,
                                   const std::string& instruction_text) {
    if (instruction_text.empty())
        return query_text;
    return query_text + " " + instruction_text;
}

Bm25Scorer::Bm25Scorer(CollectionStats stats, Bm25Params params)
    : stats_(std::move(stats)), params_(params) {}

std::vector<double> Bm25Scorer::score_batch(
    const std::vector<ScoreRequest>& requests) {
    std::vector<double> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
        const TokenizedText query = tokenize(
            join_query_instruction(r.query_text, r.instruction_text));
        out.push_back(bm25_score(query, tokenize(r.passage_text), stats_,
                                 params_));
    }
    return out;
}

ReplayScorer::ReplayScorer(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto fields = split_fields(line);
        if (fields.empty())
            continue;
        double score = 0.0;
        if (fields.size() != 2 || !parse_double(fields[1], &score))
            throw ParseError("expected '<key> <score>'", line_no);
        if (!scores_.emplace(fields[0], score).second)
            throw ParseError("duplicate replay key " + fields[0], line_no);
    }
}

std::vector<double> ReplayScorer::score_batch(
    const std::vector<ScoreRequest>& requests) {
    std::vector<double> out;
    out.reserve(requests.size());
    for (const auto& r : requests) {
        const std::string key =
            request_key(r.query_text, r.instruction_text, r.passage_text);
        auto it = scores_.find(key);
        if (it == scores_.end())
            throw std::runtime_error("replay file has no score for request " +
                                     r.request_id + " (key " + key + ")");
        out.push_back(it->second);
    }
    return out;
}

RecordingScorer::RecordingScorer(Scorer& inner) : inner_(inner) {}

std::vector<double> RecordingScorer::score_batch(
    const std::vector<ScoreRequest>& requests) {
    std::vector<double> scores = inner_.score_batch(requests);
    for (std::size_t i = 0; i < requests.size(); ++i)
        recorded_[request_key(requests[i].query_text,
                              requests[i].instruction_text,
                              requests[i].passage_text)] = scores[i];
    return scores;
}

void RecordingScorer::save(std::ostream& out) const {
    for (const auto& [key, score] : recorded_)
        out << key << ' ' << format_double(score) << '\n';
}

// ---------------------------------------------------------------------------
// Child-process bridge

namespace {

using nlohmann::json;

std::string encode_request(const ScoreRequest& r) {
    json j;
    j["type"] = "score";
    j["request_id"] = r.request_id;
    j["query_text"] = r.query_text;
    j["instruction_text"] = r.instruction_text;
    j["passage_text"] = r.passage_text;
    return j.dump() + "\n";
}

void set_nonblocking(int fd) {
    int flags = fcntl(fd, F_GETFL, 0);
    if (flags < 0 || fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0)
        throw std::runtime_error("fcntl(O_NONBLOCK) failed");
}

}  // namespace

struct ProcessScorer::Impl {
    BridgeOptions options;
    pid_t pid = -1;
    int to_child = -1;    // we write requests here
    int from_child = -1;  // we read responses here
    bool finished = false;
    bool failed = false;
    std::size_t answered_total = 0;
    std::size_t sent_total = 0;

    std::string outbox;          // bytes not yet written to the child
    std::string inbox;           // bytes read but not yet split into lines
    std::deque<std::string> lines;

    void spawn() {
        int in_pipe[2];   // parent -> child stdin
        int out_pipe[2];  // child stdout -> parent
        if (pipe(in_pipe) != 0)
            throw std::runtime_error("pipe() failed: " +
                                     std::string(std::strerror(errno)));
        if (pipe(out_pipe) != 0) {
            close(in_pipe[0]);
            close(in_pipe[1]);
            throw std::runtime_error("pipe() failed: " +
                                     std::string(std::strerror(errno)));
        }
        // A dead child must surface as EPIPE on write, not a fatal signal.
        signal(SIGPIPE, SIG_IGN);
        pid = fork();
        if (pid < 0) {
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]})
                close(fd);
            throw std::runtime_error("fork() failed: " +
                                     std::string(std::strerror(errno)));
        }
        if (pid == 0) {
            dup2(in_pipe[0], STDIN_FILENO);
            dup2(out_pipe[1], STDOUT_FILENO);
            for (int fd : {in_pipe[0], in_pipe[1], out_pipe[0], out_pipe[1]})
                close(fd);
            execl("/bin/sh", "sh", "-c", options.command.c_str(),
                  static_cast<char*>(nullptr));
            _exit(127);
        }
        close(in_pipe[0]);
        close(out_pipe[1]);
        to_child = in_pipe[1];
        from_child = out_pipe[0];
        set_nonblocking(to_child);
        set_nonblocking(from_child);
    }

    void close_fd(int& fd) {
        if (fd >= 0) {
            close(fd);
            fd = -1;
        }
    }

    void kill_child() {
        if (pid > 0) {
            ::kill(pid, SIGKILL);
            int status = 0;
            waitpid(pid, &status, 0);
            pid = -1;
        }
        close_fd(to_child);
        close_fd(from_child);
    }

    [[noreturn]] void fail(const std::string& message) {
        failed = true;
        std::ostringstream out;
        out << "scorer bridge: " << message << " (answered " << answered_total
            << " of " << sent_total << " requests so far)";
        kill_child();
        throw std::runtime_error(out.str());
    }

    // Moves buffered outbox bytes to the child; returns true on progress.
    bool pump_out() {
        bool progress = false;
        while (!outbox.empty()) {
            ssize_t n = write(to_child, outbox.data(), outbox.size());
            if (n > 0) {
                outbox.erase(0, static_cast<std::size_t>(n));
                progress = true;
                continue;
            }
            if (n < 0 && (errno == EAGAIN || errno == EWOULDBLOCK))
                break;
            if (n < 0 && errno == EINTR)
                continue;
            fail("writing to the scorer failed: " +
                 std::string(std::strerror(errno)));
        }
        return progress;
    }

    // Reads whatever the child has written; returns false on end of stream.
    enum class ReadResult { Progress, WouldBlock, Eof };
    ReadResult pump_in() {
        char buf[65536];
        bool progress = false;
        for (;;) {
            ssize_t n = read(from_child, buf, sizeof buf);
            if (n > 0) {
                inbox.append(buf, static_cast<std::size_t>(n));
                progress = true;
                continue;
            }
            if (n == 0)
                return ReadResult::Eof;
            if (errno == EAGAIN || errno == EWOULDBLOCK)
                return progress ? ReadResult::Progress : ReadResult::WouldBlock;
            if (errno == EINTR)
                continue;
            fail("reading from the scorer failed: " +
                 std::string(std::strerror(errno)));
        }
    }

    void split_lines() {
        std::size_t start = 0;
        for (;;) {
            std::size_t nl = inbox.find('\n', start);
            if (nl == std::string::npos)
                break;
            lines.emplace_back(inbox.substr(start, nl - start));
            start = nl + 1;
        }
        inbox.erase(0, start);
    }

    // Runs the poll loop until `done()` is true or something goes wrong.
    template <class DoneFn, class LineFn>
    void pump_until(DoneFn done, LineFn on_line) {
        using clock = std::chrono::steady_clock;
        auto last_progress = clock::now();
        bool saw_eof = false;
        while (!done()) {
            while (!lines.empty()) {
                std::string line = std::move(lines.front());
                lines.pop_front();
                on_line(std::move(line));
                last_progress = clock::now();
                if (done())
                    return;
            }
            if (saw_eof)
                fail("the scorer exited before answering every request");

            struct pollfd fds[2];
            nfds_t nfds = 0;
            fds[nfds].fd = from_child;
            fds[nfds].events = POLLIN;
            ++nfds;
            if (!outbox.empty()) {
                fds[nfds].fd = to_child;
                fds[nfds].events = POLLOUT;
                ++nfds;
            }
            int ready = poll(fds, nfds, 200);
            if (ready < 0) {
                if (errno == EINTR)
                    continue;
                fail("poll() failed: " + std::string(std::strerror(errno)));
            }
            bool progress = false;
            if (!outbox.empty())
                progress |= pump_out();
            ReadResult r = pump_in();
            split_lines();
            if (r == ReadResult::Eof) {
                saw_eof = true;
                if (!inbox.empty()) {
                    // Tolerate a final response without a trailing newline.
                    lines.emplace_back(std::move(inbox));
                    inbox.clear();
                }
            }
            progress |= (r == ReadResult::Progress) || saw_eof;
            progress |= !lines.empty();
            if (progress) {
                last_progress = clock::now();
            } else if (std::chrono::duration<double>(clock::now() -
                                                     last_progress)
                           .count() > options.timeout_seconds) {
                fail("timed out after " + format_double(options.timeout_seconds) +
                     "s of scorer inactivity");
            }
        }
    }
};

ProcessScorer::ProcessScorer(BridgeOptions options)
    : impl_(std::make_unique<Impl>()) {
    if (options.command.empty())
        throw UsageError("scorer command is empty");
    if (!(options.timeout_seconds > 0))
        throw UsageError("scorer timeout must be positive");
    impl_->options = std::move(options);
    impl_->spawn();
}

ProcessScorer::~ProcessScorer() {
    try {
        if (!impl_->failed)
            finish();
    } catch (...) {
        // Destructor path: the session already produced its scores or threw.
    }
    impl_->kill_child();
}

std::vector<double> ProcessScorer::score_batch(
    const std::vector<ScoreRequest>& requests) {
    Impl& io = *impl_;
    if (io.finished)
        throw std::logic_error("score_batch called after finish()");
    if (requests.empty())
        return {};

    std::unordered_map<std::string, std::size_t> index;
    std::vector<char> answered(requests.size(), 0);
    std::vector<char> retried(requests.size(), 0);
    std::vector<double> scores(requests.size(), 0.0);
    std::size_t remaining = requests.size();

    for (std::size_t i = 0; i < requests.size(); ++i) {
        if (!index.emplace(requests[i].request_id, i).second)
            throw std::invalid_argument("duplicate request_id " +
                                        requests[i].request_id);
        io.outbox += encode_request(requests[i]);
    }
    io.outbox += "{\"type\":\"flush\"}\n";
    io.sent_total += requests.size();

    auto on_line = [&](std::string line) {
        if (line.empty())
            return;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object())
            io.fail("unparseable response line: " + line);
        if (!j.contains("request_id") || !j["request_id"].is_string())
            io.fail("response without request_id: " + line);
        const std::string id = j["request_id"].get<std::string>();
        auto it = index.find(id);
        if (it == index.end())
            io.fail("response for unknown request_id " + id);
        const std::size_t slot = it->second;
        if (answered[slot])
            io.fail("request_id " + id + " answered twice");

        const bool has_score = j.contains("score") && j["score"].is_number();
        const bool has_logits = j.contains("logit_true") &&
                                j["logit_true"].is_number() &&
                                j.contains("logit_false") &&
                                j["logit_false"].is_number();
        double value = 0.0;
        bool ok = false;
        if (has_score && !has_logits) {
            value = j["score"].get<double>();
            ok = std::isfinite(value);
        } else if (has_logits && !has_score) {
            const double lt = j["logit_true"].get<double>();
            const double lf = j["logit_false"].get<double>();
            if (std::isfinite(lt) && std::isfinite(lf)) {
                value = logitpair_to_score(lt, lf);
                ok = true;
            }
        }
        if (!ok) {
            if (retried[slot])
                io.fail("request_id " + id +
                        " got a second malformed response: " + line);
            retried[slot] = 1;
            io.outbox += encode_request(requests[slot]);
            io.outbox += "{\"type\":\"flush\"}\n";
            return;
        }
        answered[slot] = 1;
        scores[slot] = value;
        ++io.answered_total;
        --remaining;
    };

    io.pump_until([&] { return remaining == 0; }, on_line);
    return scores;
}

void ProcessScorer::finish() {
    Impl& io = *impl_;
    if (io.finished || io.failed)
        return;
    io.finished = true;
    io.outbox += "{\"type\":\"end\"}\n";
    // Drain the farewell write, then close and reap.
    while (!io.outbox.empty()) {
        struct pollfd fd{io.to_child, POLLOUT, 0};
        if (poll(&fd, 1, 1000) <= 0)
            break;
        if (!io.pump_out())
            break;
    }
    io.close_fd(io.to_child);
    int status = 0;
    pid_t done = -1;
    // Give the child a moment to exit on its own.
    for (int i = 0; i < 100; ++i) {
        done = waitpid(io.pid, &status, WNOHANG);
        if (done != 0)
            break;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    if (done == 0) {
        ::kill(io.pid, SIGKILL);
        waitpid(io.pid, &status, 0);
    }
    io.pid = -1;
    io.close_fd(io.from_child);
}

// ---------------------------------------------------------------------------
// Pool reranking

std::string instruction_for(const QueryRecord& query,
                            const std::string& variant) {
    if (variant == "none")
        return "";
    if (variant == "original")
        return query.instruction_original;
    if (variant == "modified") {
        if (!query.instruction_modified)
            throw UsageError("query " + query.query_id +
                             " has no modified instruction");
        return *query.instruction_modified;
    }
    auto it = query.variants.find(variant);
    if (it == query.variants.end())
        throw UsageError("query " + query.query_id +
                         " has no instruction variant '" + variant + "'");
    return it->second;
}

namespace {

struct QueryTask {
    const Pool* pool = nullptr;
    const QueryRecord* query = nullptr;
    std::vector<ScoreRequest> requests;
    std::vector<const Passage*> request_passage;  // parallel to requests
};

}  // namespace

Run rerank_pools(const std::map<std::string, Pool>& pools,
                 const std::vector<QueryRecord>& queries,
                 const std::string& variant,
                 const std::vector<Passage>& corpus, Scorer& scorer,
                 const std::string& tag, int threads) {
    std::unordered_map<std::string, const QueryRecord*> by_id;
    for (const auto& q : queries)
        by_id.emplace(q.query_id, &q);

    std::unordered_map<std::string, std::vector<const Passage*>> passages_by_doc;
    for (const auto& p : corpus)
        passages_by_doc[p.doc_id].push_back(&p);

    std::vector<QueryTask> tasks;
    tasks.reserve(pools.size());
    for (const auto& [qid, pool] : pools) {
        auto qit = by_id.find(qid);
        if (qit == by_id.end())
            throw std::runtime_error("pooled query " + qid +
                                     " is missing from the dataset");
        QueryTask task;
        task.pool = &pool;
        task.query = qit->second;
        const std::string instruction = instruction_for(*qit->second, variant);
        for (const auto& entry : pool.entries) {
            auto pit = passages_by_doc.find(entry.doc_id);
            if (pit == passages_by_doc.end())
                throw std::runtime_error("pooled document " + entry.doc_id +
                                         " (query " + qid +
                                         ") has no passages in the corpus");
            for (const Passage* passage : pit->second) {
                ScoreRequest r;
                r.request_id = qid + "#" +
                               passage_id(entry.doc_id, passage->passage_index);
                r.query_text = qit->second->query_text;
                r.instruction_text = instruction;
                r.passage_text = passage->text;
                task.requests.push_back(std::move(r));
                task.request_passage.push_back(passage);
            }
        }
        tasks.push_back(std::move(task));
    }

    std::vector<std::vector<double>> all_scores(tasks.size());
    const int workers =
        scorer.thread_safe() ? std::max(1, std::min<int>(threads, 64)) : 1;
    if (workers <= 1 || tasks.size() <= 1) {
        for (std::size_t i = 0; i < tasks.size(); ++i)
            all_scores[i] = scorer.score_batch(tasks[i].requests);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool_threads;
        std::vector<std::exception_ptr> errors(
            static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool_threads.emplace_back([&, w] {
                try {
                    for (;;) {
                        const std::size_t i =
                            next.fetch_add(1, std::memory_order_relaxed);
                        if (i >= tasks.size())
                            return;
                        all_scores[i] = scorer.score_batch(tasks[i].requests);
                    }
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] =
                        std::current_exception();
                }
            });
        }
        for (auto& t : pool_threads)
            t.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    Run run;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const QueryTask& task = tasks[i];
        std::map<std::string, double> doc_best;
        for (std::size_t j = 0; j < task.requests.size(); ++j) {
            const std::string& doc_id = task.request_passage[j]->doc_id;
            auto [it, inserted] = doc_best.emplace(doc_id, all_scores[i][j]);
            if (!inserted && all_scores[i][j] > it->second)
                it->second = all_scores[i][j];
        }
        std::vector<std::pair<std::string, double>> doc_scores(
            doc_best.begin(), doc_best.end());
        run.add_group(task.pool->query_id,
                      rank_doc_scores(task.pool->query_id, doc_scores, tag));
    }
    return run;
}

}  // namespace ireval
