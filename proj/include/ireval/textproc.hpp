#ifndef IREVAL_TEXTPROC_HPP
#define IREVAL_TEXTPROC_HPP

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace ireval {

// A fixed word window of one document. Passages of a document cover every
// word; consecutive windows start `stride` words apart.
struct Passage {
    std::string doc_id;
    int passage_index = 0;
    int start_word = 0;
    std::string text;

    bool operator==(const Passage&) const = default;
};

struct TokenizedText {
    std::vector<std::string> tokens;

    bool operator==(const TokenizedText&) const = default;
};

// Raw whitespace-separated words, original form kept. This is the word
// basis for chunking, so no document text is dropped.
std::vector<std::string> split_words(std::string_view text);

// Scoring/statistics tokens: split on Unicode whitespace, strip leading and
// trailing punctuation from each word, lowercase, drop empties.
TokenizedText tokenize(std::string_view text);

// Emits windows starting at 0, stride, 2*stride, ...; stops once a window's
// end reaches the last word. A document shorter than `window` yields exactly
// one passage. Throws std::invalid_argument unless 0 < stride <= window.
std::vector<Passage> chunk_document(const std::string& doc_id,
                                    std::string_view text, int window = 400,
                                    int stride = 200);

// Document score = maximum passage score. Throws on empty input.
double maxp_aggregate(const std::vector<double>& passage_scores);

// Synthesized id used when passages appear in runs: "docid#index".
std::string passage_id(const std::string& doc_id, int passage_index);

// Passage corpus: one JSON record per line with doc_id, passage_index,
// start_word, text.
std::vector<Passage> load_passages(std::istream& in);
void write_passages(std::ostream& out, const std::vector<Passage>& passages);

// Whole documents before chunking.
struct Document {
    std::string doc_id;
    std::string text;

    bool operator==(const Document&) const = default;
};

// Document corpus: one JSON record per line with doc_id, text. Duplicate
// doc ids are a ParseError.
std::vector<Document> load_documents(std::istream& in);
void write_documents(std::ostream& out, const std::vector<Document>& documents);

}  // namespace ireval

#endif
