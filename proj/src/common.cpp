#include "ireval/common.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ireval {

std::string to_hex(std::uint64_t value) {
    static const char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[value & 0xF];
        value >>= 4;
    }
    return out;
}

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

std::vector<std::string> split_fields(std::string_view line) {
    std::vector<std::string> fields;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                                   line[i] == '\r' || line[i] == '\n' ||
                                   line[i] == '\v' || line[i] == '\f')) {
            ++i;
        }
        std::size_t start = i;
        while (i < line.size() && !(line[i] == ' ' || line[i] == '\t' ||
                                    line[i] == '\r' || line[i] == '\n' ||
                                    line[i] == '\v' || line[i] == '\f')) {
            ++i;
        }
        if (i > start) fields.emplace_back(line.substr(start, i - start));
    }
    return fields;
}

bool parse_int(std::string_view text, long long* out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), *out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double* out) {
    if (text.empty()) return false;
    auto res = std::from_chars(text.data(), text.data() + text.size(), *out);
    return res.ec == std::errc() && res.ptr == text.data() + text.size();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream oss;
    oss << in.rdbuf();
    return oss.str();
}

}  // namespace ireval
