#include "metaqa/profile.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "metaqa/errors.hpp"

namespace metaqa {

double ProfileSet::normalized_sum() const {
  double sum = 0.0;
  for (const auto& p : profiles) sum += p.normalized_importance_rate;
  return sum;
}

std::array<double, kFieldCount> compute_importance_rates(std::span<const OerRecord> records) {
  if (records.empty()) {
    throw FatalError("importance rates need at least one record");
  }
  std::array<double, kFieldCount> rates{};
  for (const auto& record : records) {
    for (Field f : kAllFields) {
      if (field_available(record, f)) rates[field_index(f)] += 1.0;
    }
  }
  for (auto& r : rates) r /= static_cast<double>(records.size());
  return rates;
}

std::array<double, kFieldCount> normalize_rates(const std::array<double, kFieldCount>& rates) {
  double sum = 0.0;
  for (double r : rates) sum += r;
  if (sum <= 0.0) {
    throw FatalError("cannot normalize importance rates: all rates are zero");
  }
  std::array<double, kFieldCount> out{};
  for (int i = 0; i < kFieldCount; ++i) out[i] = rates[i] / sum;
  return out;
}

NormalFit fit_normal(std::span<const int> samples) {
  if (samples.size() < 2) {
    throw FatalError("normal fit needs at least two samples, got " +
                     std::to_string(samples.size()));
  }
  double mean = 0.0;
  for (int s : samples) mean += static_cast<double>(s);
  mean /= static_cast<double>(samples.size());
  double ss = 0.0;
  for (int s : samples) {
    const double d = static_cast<double>(s) - mean;
    ss += d * d;
  }
  const double scale = std::sqrt(ss / static_cast<double>(samples.size() - 1));
  return NormalFit{mean, scale, scale == 0.0};
}

ProfileSet build_profile_set(std::span<const OerRecord> records) {
  std::vector<OerRecord> controlled;
  controlled.reserve(records.size());
  for (const auto& r : records) {
    if (r.quality_control == QualityControl::WithControl) controlled.push_back(r);
  }
  if (controlled.empty()) {
    throw FatalError("profiling needs at least one quality-controlled record");
  }

  const auto rates = compute_importance_rates(controlled);
  const auto normalized = normalize_rates(rates);

  ProfileSet set;
  set.source_corpus_size = records.size();
  set.controlled_subset_size = controlled.size();
  for (Field f : kAllFields) {
    FieldProfile& profile = set.profiles[field_index(f)];
    profile.field = f;
    profile.importance_rate = rates[field_index(f)];
    profile.normalized_importance_rate = normalized[field_index(f)];
    if (is_length_field(f)) {
      std::vector<int> lengths;
      lengths.reserve(controlled.size());
      for (const auto& r : controlled) {
        if (const auto len = field_length(r, f)) lengths.push_back(*len);
      }
      profile.rating_fn = fit_normal(lengths);
    } else {
      profile.rating_fn = BooleanRating{};
    }
  }
  validate_profile_set(set, kComputedProfileSumTolerance);
  return set;
}

ProfileSet builtin_profile_set() {
  struct Row {
    Field field;
    double rate;
    double normalized;
    double mean;
    double scale;
  };
  // Shipped benchmark constants (length fields carry a fit, the rest are
  // presence-rated; mean/scale are ignored for those).
  static constexpr Row rows[kFieldCount] = {
      {Field::Title, 1.00, 0.170, 5.5, 2.5},
      {Field::Description, 1.00, 0.170, 54.5, 40.0},
      {Field::Subjects, 0.86, 0.145, 4.5, 3.5},
      {Field::Level, 0.98, 0.165, 0.0, 0.0},
      {Field::Language, 0.92, 0.155, 0.0, 0.0},
      {Field::TimeRequired, 0.58, 0.098, 0.0, 0.0},
      {Field::Accessibilities, 0.59, 0.099, 0.0, 0.0},
  };

  ProfileSet set;
  set.source_corpus_size = 8887;
  set.controlled_subset_size = 4651;
  for (const Row& row : rows) {
    FieldProfile& profile = set.profiles[field_index(row.field)];
    profile.field = row.field;
    profile.importance_rate = row.rate;
    profile.normalized_importance_rate = row.normalized;
    if (is_length_field(row.field)) {
      profile.rating_fn = NormalFit{row.mean, row.scale, false};
    } else {
      profile.rating_fn = BooleanRating{};
    }
  }
  validate_profile_set(set, kLoadedProfileSumTolerance);
  return set;
}

void validate_profile_set(const ProfileSet& set, double sum_tolerance) {
  for (Field f : kAllFields) {
    const FieldProfile& p = set.profiles[field_index(f)];
    if (p.field != f) {
      throw FatalError("profile set out of order: slot " +
                       std::string(field_name(f)) + " holds " + std::string(field_name(p.field)));
    }
    if (p.importance_rate < 0.0 || p.importance_rate > 1.0 ||
        p.normalized_importance_rate < 0.0 || p.normalized_importance_rate > 1.0) {
      throw FatalError("profile rate out of [0, 1] for field " + std::string(field_name(f)));
    }
    const bool has_fit = std::holds_alternative<NormalFit>(p.rating_fn);
    if (has_fit != is_length_field(f)) {
      throw FatalError("rating function kind does not match field " +
                       std::string(field_name(f)));
    }
    if (has_fit) {
      const auto& fit = std::get<NormalFit>(p.rating_fn);
      if (fit.scale < 0.0 || (fit.scale == 0.0 && !fit.degenerate)) {
        throw FatalError("invalid normal-fit scale for field " + std::string(field_name(f)));
      }
    }
  }
  const double sum = set.normalized_sum();
  if (std::abs(sum - 1.0) > sum_tolerance) {
    throw FatalError("normalized importance rates sum to " + std::to_string(sum) +
                     ", outside tolerance " + std::to_string(sum_tolerance));
  }
}

}  // namespace metaqa
