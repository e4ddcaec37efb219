#include "bikeclust/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "bikeclust/error.hpp"

namespace bikeclust::csv {

std::optional<Record> Reader::next() {
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (first_) {
            first_ = false;
            if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
        }
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;

        Record rec;
        rec.line = line_;
        std::string field;
        bool in_quotes = false;
        bool was_quoted = false;
        std::size_t i = 0;
        while (true) {
            if (i == line.size()) {
                if (!in_quotes) break;
                // Quoted field continues on the next physical line.
                std::string more;
                if (!std::getline(in_, more)) {
                    throw Error("line " + std::to_string(rec.line) + ": unterminated quoted field");
                }
                ++line_;
                if (!more.empty() && more.back() == '\r') more.pop_back();
                field.push_back('\n');
                line = std::move(more);
                i = 0;
                continue;
            }
            const char c = line[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        field.push_back('"');
                        ++i;
                    } else {
                        in_quotes = false;
                    }
                } else {
                    field.push_back(c);
                }
            } else if (c == ',') {
                rec.fields.push_back(std::move(field));
                field.clear();
                was_quoted = false;
            } else if (c == '"' && field.empty() && !was_quoted) {
                in_quotes = true;
                was_quoted = true;
            } else if (c == '"') {
                throw Error("line " + std::to_string(rec.line) + ": stray quote in unquoted field");
            } else {
                field.push_back(c);
            }
            ++i;
        }
        rec.fields.push_back(std::move(field));
        return rec;
    }
    return std::nullopt;
}

std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == name) return i;
    }
    return std::nullopt;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return std::string(buf.data(), res.ptr);
}

std::string_view trim(std::string_view text) {
    const auto first = text.find_first_not_of(" \t");
    if (first == std::string_view::npos) return {};
    const auto last = text.find_last_not_of(" \t");
    return text.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    double value = 0.0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

std::optional<long long> parse_integer(std::string_view text) {
    text = trim(text);
    if (text.empty()) return std::nullopt;
    if (text.front() == '+') text.remove_prefix(1);
    long long value = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return value;
}

}  // namespace bikeclust::csv
