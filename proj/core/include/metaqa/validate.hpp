#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "metaqa/forest.hpp"
#include "metaqa/mapping.hpp"
#include "metaqa/profile.hpp"
#include "metaqa/record.hpp"

namespace metaqa {

enum class DiffSign { Positive, Negative, Zero };

std::string_view diff_sign_name(DiffSign sign);  // "+", "-", "0"

// Per-subject comparison of mean user rating between the predicted groups.
// A row is valid when both groups are non-empty; only valid rows enter the
// sign tally and the summary average.
struct SubjectValidationRow {
  std::string subject;
  std::optional<double> mean_rating_with;
  std::optional<double> mean_rating_without;
  double rating_difference = 0.0;  // meaningful only when valid()
  DiffSign sign = DiffSign::Zero;
  std::int64_t n_with = 0;
  std::int64_t n_without = 0;

  bool valid() const { return mean_rating_with && mean_rating_without; }
};

struct ValidationSummary {
  double average_difference = 0.0;  // unweighted mean over valid rows
  bool has_average = false;         // false when no row is valid
  std::int64_t positive = 0;
  std::int64_t negative = 0;
  std::int64_t zero = 0;     // valid rows with difference exactly 0
  std::int64_t skipped = 0;  // rows with an empty predicted group
  std::size_t subjects = 0;
  std::int64_t predicted_with = 0;     // videos, not subject pairs
  std::int64_t predicted_without = 0;
};

struct ValidationReport {
  std::vector<SubjectValidationRow> rows;  // sorted by difference descending
  ValidationSummary summary;
};

// Maps every video onto the OER field set, featurizes and classifies it,
// then compares mean ratings of the predicted groups per subject. A video
// carrying several subjects counts under each of them.
ValidationReport validate_by_subject(std::span<const VideoRecord> videos,
                                     const ForestModel& model, const ProfileSet& profiles,
                                     const MappingRules& rules = MappingRules());

// Sample standard deviation (n-1) of the rating field; needs >= 2 videos.
double rating_std(std::span<const VideoRecord> videos);

// CSV mirror of the per-subject table: subject, rating_difference, sign,
// n_with, n_without, with a trailing Average row.
void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path);

}  // namespace metaqa
