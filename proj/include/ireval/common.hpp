#ifndef IREVAL_COMMON_HPP
#define IREVAL_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace ireval {

// Input that violates a file format contract. Carries the 1-based line
// number where parsing stopped.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& message, std::size_t line)
        : std::runtime_error("line " + std::to_string(line) + ": " + message),
          line_(line) {}

    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// Bad flags or unusable arguments; the CLI maps this to exit code 1,
// everything else thrown from below to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// FNV-1a, 64-bit. Used for replay keys and deterministic tie-breaks;
// stable across platforms, unlike std::hash.
inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string to_hex(std::uint64_t value);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

// Splits on ASCII whitespace, dropping empty fields.
std::vector<std::string> split_fields(std::string_view line);

// Full-string numeric parses; return false on trailing garbage.
bool parse_int(std::string_view text, long long* out);
bool parse_double(std::string_view text, double* out);

std::string read_file(const std::string& path);

}  // namespace ireval

#endif
