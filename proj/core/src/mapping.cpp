#include "metaqa/mapping.hpp"

#include <algorithm>
#include <cctype>

namespace metaqa {
namespace {

std::string lower_ascii(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> split_tokens(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

const std::vector<std::string>& default_level_keywords() {
  static const std::vector<std::string> keywords = {
      "beginner", "intermediate", "advanced", "intro",
      "introduction", "basics", "fundamentals", "101",
  };
  return keywords;
}

MappingRules::MappingRules() : level_keywords(default_level_keywords()) {}

std::optional<std::string> matched_level_keyword(std::string_view title,
                                                 std::span<const std::string> keywords) {
  const std::string lowered = lower_ascii(title);
  for (const std::string& token : split_tokens(lowered)) {
    for (const auto& keyword : keywords) {
      if (token.size() >= keyword.size() &&
          token.compare(0, keyword.size(), keyword) == 0) {
        return keyword;
      }
    }
  }
  return std::nullopt;
}

bool title_matches_level_keyword(std::string_view title,
                                 std::span<const std::string> keywords) {
  return matched_level_keyword(title, keywords).has_value();
}

OerRecord video_to_oer(const VideoRecord& video, const MappingRules& rules) {
  OerRecord oer;
  oer.url = video.url;
  if (!is_blank(video.title)) oer.title = video.title;
  if (video.description && !is_blank(*video.description)) oer.description = video.description;
  oer.educational_type = "video";
  oer.subjects = video.subjects;
  if (rules.time_required_from_length) {
    oer.time_required = std::to_string(video.length_seconds) + "s";
  }
  if (auto keyword = matched_level_keyword(video.title, rules.level_keywords)) {
    oer.level = std::move(*keyword);
  }
  if (rules.default_language) oer.languages.push_back(*rules.default_language);
  if (rules.default_accessibility) oer.accessibilities.push_back(*rules.default_accessibility);
  oer.quality_control = QualityControl::Unknown;
  return canonicalized(std::move(oer));
}

}  // namespace metaqa
