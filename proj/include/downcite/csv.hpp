#pragma once

#include <charconv>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "downcite/records.hpp"

namespace downcite {

// The file schemas need no quoting, so rows are plain delimiter splits.
inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(delim, start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

/// Reads lines, strips trailing CR, tracks 1-based line numbers.
class CsvReader {
public:
    CsvReader(std::istream& in, char delim) : in_(in), delim_(delim) {}

    bool next(std::vector<std::string>& fields) {
        std::string line;
        if (!std::getline(in_, line)) return false;
        ++line_number_;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        fields = split_fields(line, delim_);
        return true;
    }

    std::size_t line_number() const { return line_number_; }

private:
    std::istream& in_;
    char delim_;
    std::size_t line_number_ = 0;
};

inline std::int64_t parse_count(std::string_view text, std::size_t line, const char* column) {
    std::int64_t value = 0;
    const auto* begin = text.data();
    const auto* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end)
        throw InputError("line " + std::to_string(line) + ": malformed " + column + " '" +
                         std::string(text) + "'");
    return value;
}

inline std::int64_t parse_nonnegative(std::string_view text, std::size_t line, const char* column) {
    const std::int64_t value = parse_count(text, line, column);
    if (value < 0)
        throw InputError("line " + std::to_string(line) + ": negative " + column + " '" +
                         std::string(text) + "'");
    return value;
}

/// Compact deterministic float formatting for CSV emission.
inline std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace downcite
