#include "optomech/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "optomech/errors.hpp"

namespace optomech {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string format_int(long long v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%lld", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

void CsvDoc::append_line(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += csv_escape(cells[i]);
  }
  text_ += '\n';
}

void CsvDoc::header(const std::vector<std::string>& cols) {
  if (ncols_ != 0) fail(errc::bad_argument, "CSV header already written");
  ncols_ = cols.size();
  append_line(cols);
}

void CsvDoc::row(const std::vector<std::string>& cells) {
  if (cells.size() != ncols_)
    fail(errc::bad_argument, "CSV row width mismatch");
  append_line(cells);
}

void CsvDoc::numeric_row(const std::vector<double>& vals) {
  std::vector<std::string> cells;
  cells.reserve(vals.size());
  for (double v : vals) cells.push_back(format_double(v));
  row(cells);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io_error, "cannot open for writing: " + path);
  os.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!os) fail(errc::io_error, "write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_error, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  if (is.bad()) fail(errc::io_error, "read failed: " + path);
  return ss.str();
}

}  // namespace optomech
