#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace codasep::detail {

struct TextTable {
  char delimiter = ',';
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based file line of each row
};

// Blank lines are skipped; fields are trimmed and lose surrounding quotes.
TextTable read_text_table(const std::string& path, std::optional<char> delimiter);

std::vector<std::string> split_fields(std::string_view line, char delimiter);

// Shortest form that round-trips is not guaranteed by iostreams, so numbers
// are written with 17 significant digits.
std::string format_double(double value);

}  // namespace codasep::detail
