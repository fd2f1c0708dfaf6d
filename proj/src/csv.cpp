#include "flydram/csv.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace flydram::csv {

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

double parse_double(std::string_view field, const std::string& context) {
    double value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw FormatError(context + ": not a number: '" + std::string(field) + "'");
    return value;
}

uint64_t parse_u64(std::string_view field, const std::string& context) {
    uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc{} || ptr != field.data() + field.size())
        throw FormatError(context + ": not a non-negative integer: '" + std::string(field) + "'");
    return value;
}

double quantize_ns(double ns) {
    return std::round(ns * 1000.0) / 1000.0;
}

std::string format_ns(double ns) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", ns);
    return buf;
}

} // namespace flydram::csv
