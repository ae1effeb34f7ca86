#include "metaqa/csv.hpp"

namespace metaqa {

bool CsvReader::next_row(std::vector<std::string>& row) {
  row.clear();
  std::string field;
  bool quoted = false;
  bool any_input = false;

  int ch;
  while ((ch = in_.get()) != std::istream::traits_type::eof()) {
    const char c = static_cast<char>(ch);
    if (quoted) {
      if (c == '"') {
        if (in_.peek() == '"') {
          in_.get();
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
      any_input = true;
      continue;
    }
    switch (c) {
      case '"':
        quoted = true;
        any_input = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        any_input = true;
        break;
      case '\r':
        break;  // handled by the following '\n' (or ignored when stray)
      case '\n':
        if (!any_input) continue;  // skip empty lines
        row.push_back(std::move(field));
        return true;
      default:
        field.push_back(c);
        any_input = true;
        break;
    }
  }
  if (!any_input) return false;
  row.push_back(std::move(field));  // final record without trailing newline
  return true;
}

std::string csv_escape(std::string_view value) {
  const bool needs_quotes =
      value.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) return std::string(value);
  std::string out;
  out.reserve(value.size() + 2);
  out.push_back('"');
  for (char c : value) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_csv_row(std::ostream& out, std::span<const std::string> fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out.put(',');
    out << csv_escape(fields[i]);
  }
  out.put('\n');
}

}  // namespace metaqa
