#pragma once

#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace metaqa {

// RFC-4180 style reader: quoted fields, doubled-quote escapes, embedded
// separators and newlines, CRLF or LF line endings. Completely empty lines
// are skipped.
class CsvReader {
 public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Fills `row` with the next record's fields; false at end of input.
  bool next_row(std::vector<std::string>& row);

 private:
  std::istream& in_;
};

// Quotes a value when it contains separators, quotes or newlines.
std::string csv_escape(std::string_view value);

void write_csv_row(std::ostream& out, std::span<const std::string> fields);

}  // namespace metaqa
