#include "metaqa/record.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>

namespace metaqa {
namespace {

bool is_unicode_space(char32_t cp) {
  switch (cp) {
    case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D:
    case 0x20: case 0x85: case 0xA0: case 0x1680:
    case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

// Decodes the code point starting at byte i and advances i past it. Invalid
// sequences decode byte-wise so malformed input still tokenizes stably.
char32_t decode_utf8(std::string_view s, std::size_t& i) {
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(s[k]); };
  const unsigned char b0 = byte(i);
  std::size_t len = 1;
  char32_t cp = b0;
  if ((b0 & 0x80) == 0x00) {
    len = 1;
  } else if ((b0 & 0xE0) == 0xC0 && i + 1 < s.size()) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0 && i + 2 < s.size()) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0 && i + 3 < s.size()) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return b0;
  }
  for (std::size_t k = 1; k < len; ++k) {
    const unsigned char bk = byte(i + k);
    if ((bk & 0xC0) != 0x80) {  // broken continuation: fall back to the lead byte
      ++i;
      return b0;
    }
    cp = (cp << 6) | (bk & 0x3F);
  }
  i += len;
  return cp;
}

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool parse_int_component(std::string_view s, int& out) {
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string_view quality_control_name(QualityControl qc) {
  switch (qc) {
    case QualityControl::WithControl: return "with_control";
    case QualityControl::WithoutControl: return "without_control";
    case QualityControl::Unknown: return "unknown";
  }
  return "unknown";
}

std::optional<QualityControl> quality_control_from_name(std::string_view name) {
  if (name == "with_control") return QualityControl::WithControl;
  if (name == "without_control") return QualityControl::WithoutControl;
  if (name == "unknown") return QualityControl::Unknown;
  return std::nullopt;
}

QualityControl parse_quality_control_value(std::string_view value) {
  std::string v = lower_ascii(trim(value));
  std::replace(v.begin(), v.end(), ' ', '_');
  std::replace(v.begin(), v.end(), '-', '_');
  if (v == "with_control" || v == "withcontrol" || v == "controlled" || v == "1" ||
      v == "true" || v == "yes") {
    return QualityControl::WithControl;
  }
  if (v == "without_control" || v == "withoutcontrol" || v == "uncontrolled" || v == "0" ||
      v == "false" || v == "no") {
    return QualityControl::WithoutControl;
  }
  return QualityControl::Unknown;
}

std::optional<Date> parse_date(std::string_view text) {
  const std::string t = trim(text);
  // YYYY-MM-DD with an optional time suffix after 'T' or ' '.
  if (t.size() < 10 || t[4] != '-' || t[7] != '-') return std::nullopt;
  if (t.size() > 10 && t[10] != 'T' && t[10] != ' ') return std::nullopt;
  Date d;
  if (!parse_int_component(std::string_view(t).substr(0, 4), d.year) ||
      !parse_int_component(std::string_view(t).substr(5, 2), d.month) ||
      !parse_int_component(std::string_view(t).substr(8, 2), d.day)) {
    return std::nullopt;
  }
  if (d.year < 1000 || d.year > 9999 || d.month < 1 || d.month > 12 || d.day < 1) {
    return std::nullopt;
  }
  static constexpr int days_in_month[12] = {31, 29, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  if (d.day > days_in_month[d.month - 1]) return std::nullopt;
  return d;
}

std::string format_date(const Date& date) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", date.year, date.month, date.day);
  return buf;
}

int word_count(std::string_view text) {
  int words = 0;
  bool in_token = false;
  std::size_t i = 0;
  while (i < text.size()) {
    const bool space = is_unicode_space(decode_utf8(text, i));
    if (!space && !in_token) ++words;
    in_token = !space;
  }
  return words;
}

int word_count(const std::optional<std::string>& text) {
  return text ? word_count(std::string_view(*text)) : 0;
}

int subject_count(const std::vector<std::string>& subjects) {
  int n = 0;
  for (const auto& s : subjects) {
    if (!is_blank(s)) ++n;
  }
  return n;
}

bool is_blank(std::string_view text) {
  std::size_t i = 0;
  while (i < text.size()) {
    if (!is_unicode_space(decode_utf8(text, i))) return false;
  }
  return true;
}

std::string trim(std::string_view text) {
  std::size_t begin = text.size();
  std::size_t i = 0;
  while (i < text.size()) {
    const std::size_t at = i;
    if (!is_unicode_space(decode_utf8(text, i))) {
      begin = at;
      break;
    }
  }
  if (begin == text.size()) return "";
  std::size_t end = begin;
  i = begin;
  while (i < text.size()) {
    if (!is_unicode_space(decode_utf8(text, i))) end = i;
  }
  return std::string(text.substr(begin, end - begin));
}

namespace {

void canonicalize_scalar(std::optional<std::string>& value) {
  if (!value) return;
  std::string t = trim(*value);
  if (t.empty()) {
    value.reset();
  } else {
    *value = std::move(t);
  }
}

void canonicalize_list(std::vector<std::string>& values) {
  std::vector<std::string> out;
  out.reserve(values.size());
  for (const auto& v : values) {
    std::string t = trim(v);
    if (!t.empty()) out.push_back(std::move(t));
  }
  values = std::move(out);
}

}  // namespace

OerRecord canonicalized(OerRecord record) {
  record.url = trim(record.url);
  canonicalize_scalar(record.title);
  canonicalize_scalar(record.description);
  canonicalize_scalar(record.educational_type);
  canonicalize_scalar(record.level);
  canonicalize_scalar(record.time_required);
  canonicalize_list(record.subjects);
  canonicalize_list(record.accessibilities);
  canonicalize_list(record.languages);
  return record;
}

VideoRecord canonicalized(VideoRecord record) {
  record.url = trim(record.url);
  record.title = trim(record.title);
  canonicalize_scalar(record.description);
  canonicalize_list(record.subjects);
  return record;
}

bool field_available(const OerRecord& record, Field field) {
  switch (field) {
    case Field::Title: return record.title.has_value();
    case Field::Description: return record.description.has_value();
    case Field::Subjects: return !record.subjects.empty();
    case Field::Level: return record.level.has_value();
    case Field::Language: return !record.languages.empty();
    case Field::TimeRequired: return record.time_required.has_value();
    case Field::Accessibilities: return !record.accessibilities.empty();
  }
  return false;
}

std::optional<int> field_length(const OerRecord& record, Field field) {
  if (!field_available(record, field)) return std::nullopt;
  switch (field) {
    case Field::Title: return word_count(record.title);
    case Field::Description: return word_count(record.description);
    case Field::Subjects: return subject_count(record.subjects);
    default: return std::nullopt;
  }
}

std::optional<Field> field_from_name(std::string_view name) {
  for (Field f : kAllFields) {
    if (field_name(f) == name) return f;
  }
  return std::nullopt;
}

}  // namespace metaqa
