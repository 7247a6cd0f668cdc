#include "noisykmpp/csvio.hpp"

#include "noisykmpp/errors.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

namespace noisykmpp::csvio {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
}

double parse_double(const std::string& cell, bool allow_nonfinite) {
    if (cell.empty()) throw ParseError("empty numeric cell");
    double value = 0.0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("bad numeric cell: '" + cell + "'");
    }
    if (!allow_nonfinite && !std::isfinite(value)) {
        throw ParseError("non-finite value: '" + cell + "'");
    }
    return value;
}

long parse_long(const std::string& cell) {
    long value = 0;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) {
        throw ParseError("bad integer cell: '" + cell + "'");
    }
    return value;
}

std::vector<std::string> split_line(const std::string& line, char delim) {
    std::vector<std::string> cells;
    std::string cur;
    for (char ch : line) {
        if (ch == delim) {
            cells.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    cells.push_back(cur);
    return cells;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path, char delim) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        rows.push_back(split_line(line, delim));
    }
    return rows;
}

void write_text(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open file for writing: " + path);
    out << contents;
    if (!out) throw ParseError("write failed: " + path);
}

std::string join_row(const std::vector<std::string>& cells, char delim) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out.push_back(delim);
        out += cells[i];
    }
    return out;
}

} // namespace noisykmpp::csvio
