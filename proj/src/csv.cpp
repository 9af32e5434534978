#include "inplay/csv.hpp"

#include "inplay/common.hpp"

#include <charconv>
#include <istream>

namespace inplay {

std::vector<std::string> split_csv_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') {
        line.remove_suffix(1);
    }
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.emplace_back(line.substr(start));
            break;
        }
        out.emplace_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

CsvReader::CsvReader(std::istream& in) : in_(in) {
    std::string text;
    if (!std::getline(in_, text)) {
        throw ParseError(1, "missing CSV header");
    }
    line_ = 1;
    header_ = split_csv_line(text);
}

bool CsvReader::has_column(std::string_view name) const {
    for (const auto& h : header_) {
        if (h == name) {
            return true;
        }
    }
    return false;
}

std::size_t CsvReader::column(std::string_view name) const {
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) {
            return i;
        }
    }
    throw ParseError(1, "missing column '" + std::string(name) + "'");
}

std::optional<std::vector<std::string>> CsvReader::next() {
    std::string text;
    while (std::getline(in_, text)) {
        ++line_;
        if (text.empty() || text == "\r") {
            continue;
        }
        auto row = split_csv_line(text);
        if (row.size() != header_.size()) {
            throw ParseError(line_, "expected " + std::to_string(header_.size()) + " fields, got " +
                                        std::to_string(row.size()));
        }
        return row;
    }
    return std::nullopt;
}

double CsvReader::number(const std::vector<std::string>& row, std::size_t col) const {
    const std::string& s = row.at(col);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line_, "not a number: '" + s + "'");
    }
    return v;
}

long long CsvReader::integer(const std::vector<std::string>& row, std::size_t col) const {
    const std::string& s = row.at(col);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw ParseError(line_, "not an integer: '" + s + "'");
    }
    return v;
}

std::string format_number(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

} // namespace inplay
