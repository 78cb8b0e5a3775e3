// strings.hpp -- small text helpers shared by the line-based file formats.
#pragma once

#include <cstddef>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pca {

/// Error raised by any of the text-format parsers. Carries a 1-based line
/// number (0 when not tied to a specific line).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string message, std::size_t line = 0)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + message : message),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

inline std::string trim(std::string_view s) {
    const char* ws = " \t\r\n";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return std::string(s.substr(b, e - b + 1));
}

/// Splits on runs of whitespace; never produces empty tokens.
inline std::vector<std::string> split_ws(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

template <typename Range>
std::string join(const Range& items, std::string_view sep) {
    std::string out;
    bool first = true;
    for (const auto& item : items) {
        if (!first) out += sep;
        out += item;
        first = false;
    }
    return out;
}

inline std::uint64_t parse_nat(const std::string& token, std::size_t line = 0) {
    if (token.empty()) throw ParseError("expected a natural number", line);
    std::uint64_t value = 0;
    for (char c : token) {
        if (c < '0' || c > '9')
            throw ParseError("not a natural number: '" + token + "'", line);
        value = value * 10 + static_cast<std::uint64_t>(c - '0');
    }
    return value;
}

} // namespace pca
