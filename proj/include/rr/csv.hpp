#pragma once

#include <string>
#include <vector>

namespace rr::csv {

std::vector<std::string> split(const std::string& line, char sep = ',');

// Whole-file reader returning non-empty lines.
std::vector<std::string> read_lines(const std::string& path);

double to_double(const std::string& s);
int to_int(const std::string& s);

// Fixed-precision formatting so equal runs produce byte-identical files.
std::string fmt(double v, int decimals = 6);

void write_text(const std::string& path, const std::string& content);

} // namespace rr::csv
