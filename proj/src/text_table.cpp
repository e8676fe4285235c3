#include "text_table.hpp"

#include <charconv>
#include <fstream>

#include "codasep/error.hpp"

namespace codasep::detail {

namespace {

std::string_view trim(std::string_view s) {
  const auto* ws = " \t\r\n";
  const auto first = s.find_first_not_of(ws);
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(ws);
  return s.substr(first, last - first + 1);
}

}  // namespace

std::vector<std::string> split_fields(std::string_view line, char delimiter) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    auto field = trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
      field = field.substr(1, field.size() - 2);
    }
    out.emplace_back(field);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

TextTable read_text_table(const std::string& path, std::optional<char> delimiter) {
  std::ifstream in(path);
  if (!in) fail_io("cannot open '" + path + "'");

  TextTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!have_header) {
      if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
          static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF) {
        line.erase(0, 3);
      }
      table.delimiter = delimiter.value_or(line.find('\t') != std::string::npos ? '\t' : ',');
      table.header = split_fields(line, table.delimiter);
      have_header = true;
      continue;
    }
    table.rows.push_back(split_fields(line, table.delimiter));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) fail_validation("'" + path + "' is empty");
  return table;
}

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), value, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

}  // namespace codasep::detail
