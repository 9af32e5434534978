#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace inplay {

// Minimal reader for the comma-separated files this project writes: no quoting,
// first line is the header.
class CsvReader {
public:
    explicit CsvReader(std::istream& in);

    const std::vector<std::string>& header() const { return header_; }
    bool has_column(std::string_view name) const;
    // Throws ParseError when the column is absent.
    std::size_t column(std::string_view name) const;

    std::optional<std::vector<std::string>> next();
    std::size_t line() const { return line_; }

    double number(const std::vector<std::string>& row, std::size_t col) const;
    long long integer(const std::vector<std::string>& row, std::size_t col) const;

private:
    std::istream& in_;
    std::vector<std::string> header_;
    std::size_t line_ = 0;
};

std::vector<std::string> split_csv_line(std::string_view line);

// Shortest decimal representation that round-trips to the same double.
std::string format_number(double v);

} // namespace inplay
