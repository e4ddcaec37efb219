#pragma once

#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bikeclust::csv {

/// One parsed CSV record and the 1-based line on which it started.
struct Record {
    std::vector<std::string> fields;
    std::size_t line = 0;
};

/// RFC 4180 reader: comma separated, double-quote escaping, quoted fields may span lines.
/// Accepts LF and CRLF line endings and a leading UTF-8 byte-order mark.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    /// Reads the next record; returns std::nullopt at end of input. Blank lines are skipped.
    std::optional<Record> next();

private:
    std::istream& in_;
    std::size_t line_ = 0;
    bool first_ = true;
};

/// Index of `name` in `header`, or std::nullopt.
std::optional<std::size_t> find_column(const std::vector<std::string>& header, std::string_view name);

/// Quotes a field when it contains a comma, quote or newline.
std::string escape(std::string_view field);

/// Shortest decimal representation that parses back to exactly `value`.
std::string format_double(double value);

/// Strict parse of a whole field as a finite double (surrounding blanks allowed).
std::optional<double> parse_double(std::string_view text);

/// Strict parse of a whole field as a signed integer (surrounding blanks allowed).
std::optional<long long> parse_integer(std::string_view text);

std::string_view trim(std::string_view text);

}  // namespace bikeclust::csv
