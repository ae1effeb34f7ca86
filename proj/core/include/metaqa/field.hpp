#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace metaqa {

// The seven profiled metadata fields, in canonical order. Every per-field
// table in the project (rates, ratings, crosstabs) is indexed by this order.
enum class Field : int {
  Title = 0,
  Description = 1,
  Subjects = 2,
  Level = 3,
  Language = 4,
  TimeRequired = 5,
  Accessibilities = 6,
};

inline constexpr int kFieldCount = 7;

inline constexpr std::array<Field, kFieldCount> kAllFields = {
    Field::Title,    Field::Description,  Field::Subjects,        Field::Level,
    Field::Language, Field::TimeRequired, Field::Accessibilities,
};

constexpr std::string_view field_name(Field field) {
  switch (field) {
    case Field::Title: return "title";
    case Field::Description: return "description";
    case Field::Subjects: return "subjects";
    case Field::Level: return "level";
    case Field::Language: return "language";
    case Field::TimeRequired: return "time_required";
    case Field::Accessibilities: return "accessibilities";
  }
  return "";
}

std::optional<Field> field_from_name(std::string_view name);

// Fields rated through a fitted length distribution (word or subject count);
// the remaining four are rated by presence alone.
constexpr bool is_length_field(Field field) {
  return field == Field::Title || field == Field::Description || field == Field::Subjects;
}

constexpr int field_index(Field field) { return static_cast<int>(field); }

}  // namespace metaqa
