#pragma once

#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace flowrisk::csv {

/// Shortest round-trip decimal rendering of a double ("100", "0.5",
/// "1.05e-12"). Every float written to an output CSV goes through this so
/// reruns are byte-identical and reloads are exact.
std::string format_double(double v);

std::string format_int(long long v);

/// Splits one CSV line on commas. Fields in our schemas never contain
/// commas or quotes, so no quoting rules are applied. Trailing \r is
/// stripped.
std::vector<std::string_view> split_line(std::string_view line);

double parse_double(std::string_view field);  // throws std::invalid_argument
long long parse_int(std::string_view field);

/// Line-oriented CSV reader with a mandatory header row.
class Reader {
public:
    /// Opens the file and checks the header matches exactly.
    /// Returns nullopt (with an error message) when unreadable or the
    /// header differs.
    static std::optional<Reader> open(const std::string& path, std::string_view expected_header,
                                      std::string* error);

    /// Reads the next data row; false at end of file. Blank lines are
    /// skipped. `fields` points into an internal buffer valid until the
    /// next call.
    bool next(std::vector<std::string_view>& fields);

    /// 1-based line number of the row most recently returned.
    std::size_t line_number() const { return line_no_; }

private:
    Reader() = default;
    std::ifstream in_;
    std::string line_;
    std::size_t line_no_ = 0;
};

class Writer {
public:
    explicit Writer(const std::string& path);
    void row(const std::vector<std::string>& fields);
    void raw_line(std::string_view line);
    bool good() const { return out_.good(); }
    void close() { out_.close(); }

private:
    std::ofstream out_;
};

}  // namespace flowrisk::csv
