#include "flowrisk/csv.hpp"

#include <charconv>
#include <stdexcept>
#include <system_error>

namespace flowrisk::csv {

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

std::string format_int(long long v) { return std::to_string(v); }

std::vector<std::string_view> split_line(std::string_view line) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

double parse_double(std::string_view field) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("bad number: '" + std::string(field) + "'");
    return value;
}

long long parse_int(std::string_view field) {
    long long value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw std::invalid_argument("bad integer: '" + std::string(field) + "'");
    return value;
}

std::optional<Reader> Reader::open(const std::string& path, std::string_view expected_header,
                                   std::string* error) {
    Reader r;
    r.in_.open(path);
    if (!r.in_) {
        if (error) *error = "cannot open file: " + path;
        return std::nullopt;
    }
    if (!std::getline(r.in_, r.line_)) {
        if (error) *error = "empty file (missing header): " + path;
        return std::nullopt;
    }
    r.line_no_ = 1;
    std::string_view header = r.line_;
    if (!header.empty() && header.back() == '\r') header.remove_suffix(1);
    if (header != expected_header) {
        if (error)
            *error = "unexpected header in " + path + ": got '" + std::string(header) +
                     "', expected '" + std::string(expected_header) + "'";
        return std::nullopt;
    }
    return r;
}

bool Reader::next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
        ++line_no_;
        if (line_.empty() || line_ == "\r") continue;
        fields = split_line(line_);
        return true;
    }
    return false;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << fields[i];
    }
    out_ << '\n';
}

void Writer::raw_line(std::string_view line) { out_ << line << '\n'; }

}  // namespace flowrisk::csv
