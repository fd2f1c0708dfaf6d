#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "flydram/errors.hpp"

namespace flydram::csv {

std::vector<std::string_view> split(std::string_view line, char sep = ',');

double parse_double(std::string_view field, const std::string& context);
uint64_t parse_u64(std::string_view field, const std::string& context);

/// Quantize a duration to 0.001 ns, the precision carried by the file formats.
double quantize_ns(double ns);

/// Format with up to 3 fractional digits, trailing zeros kept ("7.500").
std::string format_ns(double ns);

} // namespace flydram::csv
