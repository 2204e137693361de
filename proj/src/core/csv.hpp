#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace zeroday {

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// Reads a comma-delimited file with a mandatory header row. Double-quoted
// cells are unescaped; blank lines are skipped. Ragged rows are a hard
// error reporting the 1-based file line.
CsvTable read_csv(const std::string& path);

// Quotes a cell only when it contains a comma, quote, or newline.
std::string csv_escape(std::string_view cell);

void append_csv_row(std::string& out, const std::vector<std::string>& cells);

void write_text_file(const std::string& path, std::string_view content);
std::string read_text_file(const std::string& path);

}  // namespace zeroday
