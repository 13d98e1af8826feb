#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace ecpipe {

// Minimal RFC-4180 reader: comma separated, double-quoted fields may contain
// commas and doubled quotes. Embedded newlines are not supported.
class CsvReader {
 public:
  // Throws kFileUnreadable.
  static CsvReader open(const std::string& path);
  static CsvReader from_string(std::string text);

  // Reads the header row and checks it names exactly `expected` in order
  // (case-insensitive, surrounding whitespace ignored). Throws kSchemaViolation.
  void expect_header(const std::vector<std::string>& expected);

  // Next data row, or nullopt at end of input. Blank lines are skipped.
  std::optional<std::vector<std::string>> next();

  // 1-based line number of the row last returned.
  std::size_t line() const { return line_; }
  const std::string& source() const { return source_; }

 private:
  CsvReader(std::string source, std::string text)
      : source_(std::move(source)), text_(std::move(text)) {}

  std::string source_;
  std::string text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 0;
};

std::vector<std::string> split_csv_line(std::string_view line);
std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
// Strict double parse of the whole field. Throws kParseError.
double parse_double(std::string_view field);
long parse_long(std::string_view field);

// Row-oriented table that renders either as CSV or as aligned text.
class Table {
 public:
  explicit Table(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<std::string> row);
  const std::vector<std::string>& header() const { return header_; }
  const std::vector<std::vector<std::string>>& rows() const { return rows_; }

  std::string to_csv() const;
  std::string to_text() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

// Fixed formatting used in every emitted table so outputs are byte-stable.
std::string format_number(double value, int precision = 6);

void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace ecpipe
