#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace noisykmpp::csvio {

// 17 significant digits: lossless double round-trip, diff-able output.
std::string format_double(double v);

// Parses a full double; rejects trailing junk, empty cells and non-finite
// values unless allow_nonfinite is set.
double parse_double(const std::string& cell, bool allow_nonfinite = false);

long parse_long(const std::string& cell);

std::vector<std::string> split_line(const std::string& line, char delim = ',');

// Reads every non-empty line, split by delim. Strips one trailing '\r'.
std::vector<std::vector<std::string>> read_rows(const std::string& path, char delim = ',');

void write_text(const std::string& path, const std::string& contents);

std::string join_row(const std::vector<std::string>& cells, char delim = ',');

} // namespace noisykmpp::csvio
