#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metaqa/record.hpp"

namespace metaqa {

// How video metadata maps onto the OER field set. Videos always carry a
// duration, so time_required is derivable; level has no direct counterpart
// and is inferred from the title by keyword.
struct MappingRules {
  std::vector<std::string> level_keywords;        // defaults from default_level_keywords()
  bool time_required_from_length = true;
  std::optional<std::string> default_language;    // unset: language stays absent
  std::optional<std::string> default_accessibility;

  MappingRules();
};

const std::vector<std::string>& default_level_keywords();

// Case-insensitive token-prefix match: a keyword matches when some
// whitespace-separated title token starts with it ("Beginners" matches
// "beginner"). Returns the keyword matched by the earliest matching token.
std::optional<std::string> matched_level_keyword(std::string_view title,
                                                 std::span<const std::string> keywords);
bool title_matches_level_keyword(std::string_view title,
                                 std::span<const std::string> keywords);

// Produces a canonical OerRecord with quality_control = Unknown. Title,
// description and subjects copy over; time_required and level follow the
// rules above; language/accessibilities use the rule defaults (absent unless
// configured).
OerRecord video_to_oer(const VideoRecord& video, const MappingRules& rules = MappingRules());

}  // namespace metaqa
