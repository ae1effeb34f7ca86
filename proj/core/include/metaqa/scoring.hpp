#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

#include "metaqa/profile.hpp"
#include "metaqa/record.hpp"

namespace metaqa {

// Per-record scoring output. norm_score <= avail_score always holds: ratings
// are <= 1 and absent fields rate 0.
struct ScoreReport {
  std::string url;
  double avail_score = 0.0;
  double norm_score = 0.0;
  std::array<double, kFieldCount> per_field_rating{};
  std::array<bool, kFieldCount> per_field_available{};

  bool operator==(const ScoreReport&) const = default;
};

// Rating of one field under its profile, in [0, 1]:
//   absent                      -> 0
//   presence-rated, available   -> 1
//   length-rated, length x      -> 1 when x == mean, else 1 / ceil(|x - mean| / scale);
//                                  a degenerate (scale 0) fit rates 1 at the mean, 0 elsewhere.
// The x == mean case is decided before the formula, whose ceil(0) would
// divide by zero. Total for any valid (record, profile) pair.
double rate_field(const OerRecord& record, const FieldProfile& profile);

// Weighted completeness: sum of normalized importance rates over the
// record's available fields.
double availability_score(const OerRecord& record, const ProfileSet& profiles);

// Weighted benchmark adherence: sum over all fields of normalized importance
// rate times the field's rating. Absent fields rate 0, so summing all fields
// equals summing available ones.
double normal_score(const OerRecord& record, const ProfileSet& profiles);

ScoreReport score_record(const OerRecord& record, const ProfileSet& profiles);

// One report per record, input order preserved.
std::vector<ScoreReport> score_corpus(std::span<const OerRecord> records,
                                      const ProfileSet& profiles);

}  // namespace metaqa
