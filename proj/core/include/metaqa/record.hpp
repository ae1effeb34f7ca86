#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "metaqa/field.hpp"

namespace metaqa {

enum class QualityControl { WithControl, WithoutControl, Unknown };

std::string_view quality_control_name(QualityControl qc);

// Strict parse of the canonical names ("with_control", "without_control",
// "unknown"); anything else is nullopt.
std::optional<QualityControl> quality_control_from_name(std::string_view name);

// Lenient mapping for raw corpus values ("with control", "WithControl", "1",
// "yes", ...). Unrecognized or empty values map to Unknown.
QualityControl parse_quality_control_value(std::string_view value);

struct Date {
  int year = 0;
  int month = 0;
  int day = 0;
  auto operator<=>(const Date&) const = default;
};

// Accepts ISO-8601 calendar dates, optionally followed by a time suffix
// ("2019-04-02", "2019-04-02T10:00:00Z"). Anything else is nullopt.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(const Date& date);

// One educational resource's metadata. "Absent" is canonically a missing
// optional for scalars and an empty vector for lists; canonicalized() folds
// the raw representations (empty or whitespace-only strings) into that form.
struct OerRecord {
  std::string url;
  std::optional<std::string> title;
  std::optional<std::string> description;
  std::optional<std::string> educational_type;
  std::optional<Date> date_available;
  std::optional<Date> date_issued;
  std::vector<std::string> subjects;
  std::optional<std::string> level;
  std::optional<std::string> time_required;
  std::vector<std::string> accessibilities;
  std::vector<std::string> languages;
  QualityControl quality_control = QualityControl::Unknown;

  bool operator==(const OerRecord&) const = default;
};

// One video's metadata, used for cross-repository validation.
struct VideoRecord {
  std::string url;
  std::string title;
  std::optional<std::string> description;
  std::int64_t dislikes = 0;
  std::int64_t length_seconds = 0;
  std::int64_t likes = 0;
  double rating = 0.0;  // [0, 5]
  std::vector<std::string> subjects;  // search term(s) that retrieved the video
  std::int64_t views = 0;

  bool operator==(const VideoRecord&) const = default;
};

// Number of maximal whitespace-separated tokens; whitespace is the Unicode
// White_Space set, decoded from UTF-8. Absent or blank text counts 0.
int word_count(std::string_view text);
int word_count(const std::optional<std::string>& text);
inline int word_count(const char* text) { return word_count(std::string_view(text)); }
inline int word_count(const std::string& text) { return word_count(std::string_view(text)); }

// Number of entries that are non-empty after trimming.
int subject_count(const std::vector<std::string>& subjects);

bool is_blank(std::string_view text);
std::string trim(std::string_view text);

// Folds raw field representations into canonical absent states: scalars are
// trimmed (blank -> absent), list entries are trimmed with blanks dropped.
// Idempotent.
OerRecord canonicalized(OerRecord record);
VideoRecord canonicalized(VideoRecord record);

bool field_available(const OerRecord& record, Field field);

// Word/subject count for the three length fields; nullopt when the field is
// absent or presence-rated.
std::optional<int> field_length(const OerRecord& record, Field field);

}  // namespace metaqa
