#pragma once

#include <array>
#include <span>
#include <variant>

#include "metaqa/field.hpp"
#include "metaqa/record.hpp"

namespace metaqa {

// Fitted length benchmark for a field: sample mean and sample standard
// deviation (n-1 denominator) of the field's length among records where the
// field is available. scale == 0 marks a degenerate fit (constant lengths).
struct NormalFit {
  double mean = 0.0;
  double scale = 0.0;
  bool degenerate = false;

  bool operator==(const NormalFit&) const = default;
};

// Presence/absence rating: available -> 1, absent -> 0.
struct BooleanRating {
  bool operator==(const BooleanRating&) const = default;
};

using RatingFn = std::variant<BooleanRating, NormalFit>;

// Per-field benchmark derived from the quality-controlled subset.
struct FieldProfile {
  Field field = Field::Title;
  double importance_rate = 0.0;             // availability rate in [0, 1]
  double normalized_importance_rate = 0.0;  // importance_rate / sum of all rates
  RatingFn rating_fn;

  bool operator==(const FieldProfile&) const = default;
};

struct ProfileSet {
  std::array<FieldProfile, kFieldCount> profiles{};  // indexed by Field order
  std::size_t source_corpus_size = 0;
  std::size_t controlled_subset_size = 0;

  const FieldProfile& at(Field field) const { return profiles[field_index(field)]; }
  double normalized_sum() const;

  bool operator==(const ProfileSet&) const = default;
};

// Tolerances for the sum-to-one check on normalized rates: freshly computed
// sets are exact to float noise, sets loaded from rounded constants are not.
inline constexpr double kComputedProfileSumTolerance = 1e-9;
inline constexpr double kLoadedProfileSumTolerance = 0.01;

// Fraction of the given records in which each field is available. Callers
// profiling a corpus pass the quality-controlled subset. Throws FatalError
// when records is empty.
std::array<double, kFieldCount> compute_importance_rates(std::span<const OerRecord> records);

// rate(k) / sum of rates. Throws FatalError when every rate is zero.
std::array<double, kFieldCount> normalize_rates(const std::array<double, kFieldCount>& rates);

// Mean and n-1 standard deviation of the samples. Throws FatalError when
// fewer than two samples are given; a zero spread yields a degenerate fit.
NormalFit fit_normal(std::span<const int> samples);

// Derives all seven profiles from the WithControl subset of the corpus:
// NormalFit rating for the length fields, BooleanRating for the rest.
ProfileSet build_profile_set(std::span<const OerRecord> records);

// The benchmark constants shipped with the toolkit, for scoring without a
// reference corpus. Rounded, so its normalized rates sum to 1 only within
// kLoadedProfileSumTolerance.
ProfileSet builtin_profile_set();

// Structural checks: one profile per field in canonical order, rates within
// [0, 1], normalized sum within the given tolerance, NormalFit on length
// fields only. Throws FatalError on violation.
void validate_profile_set(const ProfileSet& set, double sum_tolerance);

}  // namespace metaqa
