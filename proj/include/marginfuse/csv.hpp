#pragma once

#include <charconv>
#include <string>
#include <vector>

namespace marginfuse {

// Splits one CSV line on commas, trimming surrounding whitespace and a
// trailing '\r'. No quoting: the formats here are plain numeric/label cells.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t end = line.find(',', start);
    std::string cell = line.substr(start, end == std::string::npos ? end : end - start);
    std::size_t lo = cell.find_first_not_of(" \t\r");
    std::size_t hi = cell.find_last_not_of(" \t\r");
    cells.push_back(lo == std::string::npos ? std::string() : cell.substr(lo, hi - lo + 1));
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return cells;
}

// Locale-independent double parse; the whole token must be consumed.
inline bool parse_double(const std::string& token, double& out) {
  if (token.empty()) return false;
  const char* begin = token.data();
  const char* end = begin + token.size();
  auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace marginfuse
