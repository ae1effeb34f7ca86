#include "metaqa/scoring.hpp"

#include <cmath>

namespace metaqa {

double rate_field(const OerRecord& record, const FieldProfile& profile) {
  if (!field_available(record, profile.field)) return 0.0;
  if (std::holds_alternative<BooleanRating>(profile.rating_fn)) return 1.0;

  const auto& fit = std::get<NormalFit>(profile.rating_fn);
  const double x = static_cast<double>(*field_length(record, profile.field));
  if (x == fit.mean) return 1.0;
  if (fit.scale == 0.0) return 0.0;
  return 1.0 / std::ceil(std::abs(x - fit.mean) / fit.scale);
}

double availability_score(const OerRecord& record, const ProfileSet& profiles) {
  double score = 0.0;
  for (const auto& profile : profiles.profiles) {
    if (field_available(record, profile.field)) {
      score += profile.normalized_importance_rate;
    }
  }
  return score;
}

double normal_score(const OerRecord& record, const ProfileSet& profiles) {
  double score = 0.0;
  for (const auto& profile : profiles.profiles) {
    score += profile.normalized_importance_rate * rate_field(record, profile);
  }
  return score;
}

ScoreReport score_record(const OerRecord& record, const ProfileSet& profiles) {
  ScoreReport report;
  report.url = record.url;
  for (const auto& profile : profiles.profiles) {
    const int i = field_index(profile.field);
    const bool available = field_available(record, profile.field);
    const double rating = rate_field(record, profile);
    report.per_field_available[i] = available;
    report.per_field_rating[i] = rating;
    if (available) report.avail_score += profile.normalized_importance_rate;
    report.norm_score += profile.normalized_importance_rate * rating;
  }
  return report;
}

std::vector<ScoreReport> score_corpus(std::span<const OerRecord> records,
                                      const ProfileSet& profiles) {
  std::vector<ScoreReport> reports;
  reports.reserve(records.size());
  for (const auto& record : records) {
    reports.push_back(score_record(record, profiles));
  }
  return reports;
}

}  // namespace metaqa
