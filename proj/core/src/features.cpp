#include "metaqa/features.hpp"

#include "metaqa/scoring.hpp"

namespace metaqa {

const std::array<std::string, kFeatureCount>& feature_names() {
  static const std::array<std::string, kFeatureCount> names = {
      "avail_score",      "norm_score",       "level_available",
      "description_word_count", "title_word_count", "subject_count",
  };
  return names;
}

LabeledFeatures extract_features(const OerRecord& record, const ProfileSet& profiles) {
  LabeledFeatures out;
  out.url = record.url;
  out.label = record.quality_control;
  out.features[0] = availability_score(record, profiles);
  out.features[1] = normal_score(record, profiles);
  out.features[2] = field_available(record, Field::Level) ? 1.0 : 0.0;
  out.features[3] = static_cast<double>(word_count(record.description));
  out.features[4] = static_cast<double>(word_count(record.title));
  out.features[5] = static_cast<double>(subject_count(record.subjects));
  return out;
}

std::vector<LabeledFeatures> extract_feature_table(std::span<const OerRecord> records,
                                                   const ProfileSet& profiles) {
  std::vector<LabeledFeatures> table;
  table.reserve(records.size());
  for (const auto& record : records) {
    table.push_back(extract_features(record, profiles));
  }
  return table;
}

}  // namespace metaqa
