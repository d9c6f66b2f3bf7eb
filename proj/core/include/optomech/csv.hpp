#pragma once

// Deterministic CSV output. Numbers are formatted with %.12g so repeated runs
// with identical inputs produce byte-identical files; line endings are LF.

#include <string>
#include <vector>

namespace optomech {

std::string format_double(double v);   // %.12g
std::string format_int(long long v);
std::string csv_escape(const std::string& field);  // RFC 4180 quoting

// Builds a CSV document in memory. Commands assemble documents first and only
// then touch the filesystem, so a --check run can compare without writing.
class CsvDoc {
 public:
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<std::string>& cells);
  void numeric_row(const std::vector<double>& vals);
  const std::string& text() const { return text_; }
  std::size_t columns() const { return ncols_; }

 private:
  void append_line(const std::vector<std::string>& cells);
  std::string text_;
  std::size_t ncols_ = 0;
};

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);  // throws Error(io_error)

}  // namespace optomech
