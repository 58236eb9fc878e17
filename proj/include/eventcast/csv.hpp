#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace eventcast {

// RFC-4180 record reader over an in-memory buffer: quoted fields, doubled
// quotes, CRLF or LF line ends, embedded newlines inside quotes.
class CsvReader {
 public:
  explicit CsvReader(std::string_view text) : text_(text) {
    // UTF-8 byte order mark.
    if (text_.substr(0, 3) == "\xEF\xBB\xBF") pos_ = 3;
  }

  // Reads the next record into `fields`; false at end of input. Blank lines
  // are skipped.
  bool next(std::vector<std::string>& fields);

  // 1-based line number where the last returned record started.
  std::size_t line() const { return record_line_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t record_line_ = 0;
};

// Quotes a field when it contains a delimiter, quote or line break.
std::string csv_field(std::string_view value);

std::string read_file(const std::string& path);

}  // namespace eventcast
