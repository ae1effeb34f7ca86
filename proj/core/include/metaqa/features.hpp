#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "metaqa/profile.hpp"
#include "metaqa/record.hpp"

namespace metaqa {

inline constexpr int kFeatureCount = 6;

// Fixed feature order; training and prediction must agree on it.
const std::array<std::string, kFeatureCount>& feature_names();

struct LabeledFeatures {
  std::string url;
  std::array<double, kFeatureCount> features{};
  QualityControl label = QualityControl::Unknown;  // Unknown only for prediction rows

  bool operator==(const LabeledFeatures&) const = default;
};

// [avail_score, norm_score, level_available, description_word_count,
//  title_word_count, subject_count], carrying the record's label through.
LabeledFeatures extract_features(const OerRecord& record, const ProfileSet& profiles);

std::vector<LabeledFeatures> extract_feature_table(std::span<const OerRecord> records,
                                                   const ProfileSet& profiles);

}  // namespace metaqa
