#include "ireval/textproc.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>
#include <unordered_set>

#include <json.hpp>

#include "ireval/common.hpp"

namespace ireval {

namespace {

// Decodes the UTF-8 sequence at `i`, advancing past it. Invalid bytes are
// returned as their own value so malformed input degrades gracefully.
std::uint32_t decode_utf8(std::string_view s, std::size_t& i) {
    unsigned char b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    int len = 0;
    std::uint32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return b0;
    }
    if (i + static_cast<std::size_t>(len) > s.size()) {
        ++i;
        return b0;
    }
    for (int k = 1; k < len; ++k) {
        unsigned char bk = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
        if ((bk & 0xC0) != 0x80) {
            ++i;
            return b0;
        }
        cp = (cp << 6) | (bk & 0x3F);
    }
    i += static_cast<std::size_t>(len);
    return cp;
}

void encode_utf8(std::uint32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

// Unicode White_Space.
bool is_space_cp(std::uint32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
        case 0x20: case 0x85: case 0xA0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

// Punctuation stripped from word edges: ASCII punctuation plus the common
// general-punctuation marks (quotes, dashes, ellipsis, bullets).
bool is_strippable_punct_cp(std::uint32_t cp) {
    if (cp < 0x80) {
        return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
               (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
    }
    switch (cp) {
        case 0xA1:   // inverted exclamation
        case 0xAB:   // left guillemet
        case 0xB7:   // middle dot
        case 0xBB:   // right guillemet
        case 0xBF:   // inverted question mark
            return true;
        default:
            return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E);
    }
}

std::uint32_t lowercase_cp(std::uint32_t cp) {
    if (cp >= 'A' && cp <= 'Z') return cp + 0x20;
    // Latin-1 uppercase block, skipping the multiplication sign.
    if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 0x20;
    return cp;
}

}  // namespace

std::vector<std::string> split_words(std::string_view text) {
    std::vector<std::string> words;
    std::size_t i = 0;
    std::size_t word_start = 0;
    bool in_word = false;
    while (i < text.size()) {
        std::size_t cp_start = i;
        std::uint32_t cp = decode_utf8(text, i);
        if (is_space_cp(cp)) {
            if (in_word) {
                words.emplace_back(text.substr(word_start, cp_start - word_start));
                in_word = false;
            }
        } else if (!in_word) {
            word_start = cp_start;
            in_word = true;
        }
    }
    if (in_word) words.emplace_back(text.substr(word_start));
    return words;
}

TokenizedText tokenize(std::string_view text) {
    TokenizedText out;
    for (const std::string& word : split_words(text)) {
        std::vector<std::uint32_t> cps;
        std::size_t i = 0;
        while (i < word.size()) cps.push_back(decode_utf8(word, i));
        std::size_t begin = 0;
        std::size_t end = cps.size();
        while (begin < end && is_strippable_punct_cp(cps[begin])) ++begin;
        while (end > begin && is_strippable_punct_cp(cps[end - 1])) --end;
        if (begin == end) continue;
        std::string token;
        for (std::size_t k = begin; k < end; ++k)
            encode_utf8(lowercase_cp(cps[k]), token);
        out.tokens.push_back(std::move(token));
    }
    return out;
}

std::vector<Passage> chunk_document(const std::string& doc_id,
                                    std::string_view text, int window,
                                    int stride) {
    if (window <= 0) throw std::invalid_argument("window must be positive");
    if (stride <= 0 || stride > window) {
        throw std::invalid_argument("stride must be in (0, window]");
    }
    std::vector<std::string> words = split_words(text);
    const std::size_t n = words.size();
    const std::size_t w = static_cast<std::size_t>(window);
    const std::size_t s = static_cast<std::size_t>(stride);

    std::vector<Passage> passages;
    for (std::size_t index = 0;; ++index) {
        std::size_t start = index * s;
        std::size_t end = std::min(start + w, n);
        std::string joined;
        for (std::size_t k = start; k < end; ++k) {
            if (k > start) joined.push_back(' ');
            joined += words[k];
        }
        passages.push_back(Passage{doc_id, static_cast<int>(index),
                                   static_cast<int>(start), std::move(joined)});
        if (start + w >= n) break;
    }
    return passages;
}

double maxp_aggregate(const std::vector<double>& passage_scores) {
    if (passage_scores.empty()) {
        throw std::invalid_argument("no passage scores to aggregate");
    }
    double best = passage_scores.front();
    for (double score : passage_scores)
        if (score > best) best = score;
    return best;
}

std::string passage_id(const std::string& doc_id, int passage_index) {
    return doc_id + "#" + std::to_string(passage_index);
}

std::vector<Passage> load_passages(std::istream& in) {
    std::vector<Passage> passages;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid passage record: ") + e.what(),
                             lineno);
        }
        Passage p;
        try {
            p.doc_id = obj.at("doc_id").get<std::string>();
            p.passage_index = obj.at("passage_index").get<int>();
            p.start_word = obj.at("start_word").get<int>();
            p.text = obj.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad passage fields: ") + e.what(), lineno);
        }
        if (p.passage_index < 0 || p.start_word < 0) {
            throw ParseError("negative passage_index or start_word", lineno);
        }
        passages.push_back(std::move(p));
    }
    return passages;
}

void write_passages(std::ostream& out, const std::vector<Passage>& passages) {
    for (const Passage& p : passages) {
        nlohmann::json obj;
        obj["doc_id"] = p.doc_id;
        obj["passage_index"] = p.passage_index;
        obj["start_word"] = p.start_word;
        obj["text"] = p.text;
        out << obj.dump() << '\n';
    }
}

std::vector<Document> load_documents(std::istream& in) {
    std::vector<Document> documents;
    std::unordered_set<std::string> seen;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("invalid document record: ") + e.what(),
                             lineno);
        }
        Document d;
        try {
            d.doc_id = obj.at("doc_id").get<std::string>();
            d.text = obj.at("text").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("bad document fields: ") + e.what(),
                             lineno);
        }
        if (!seen.insert(d.doc_id).second) {
            throw ParseError("duplicate doc_id " + d.doc_id, lineno);
        }
        documents.push_back(std::move(d));
    }
    return documents;
}

void write_documents(std::ostream& out, const std::vector<Document>& documents) {
    for (const Document& d : documents) {
        nlohmann::json obj;
        obj["doc_id"] = d.doc_id;
        obj["text"] = d.text;
        out << obj.dump() << '\n';
    }
}

}  // namespace ireval
