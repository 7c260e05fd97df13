#pragma once

#include <string>
#include <vector>

namespace cvqkd::csv {

/// Shortest representation that round-trips the exact double ("full precision"
/// without the %.17g digit noise). Used for parameters and sample values.
std::string format_full(double v);

/// Six significant digits; used for rates and other derived figures of merit.
std::string format_rate(double v);

std::vector<std::string> split_line(const std::string& line);

/// Strips a UTF-8 BOM in place if present.
void strip_bom(std::string& line);

double parse_double(const std::string& field, const char* what);

}  // namespace cvqkd::csv
