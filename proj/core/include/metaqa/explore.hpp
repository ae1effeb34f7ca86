#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <vector>

#include "metaqa/field.hpp"
#include "metaqa/record.hpp"

namespace metaqa {

// Per-field availability by quality-control group. Records with an Unknown
// label are excluded and counted, so for a fully labeled corpus every
// field's four cells sum to the corpus size.
struct AvailabilityCrosstab {
  // counts[field][control][availability]; control 0 = with, 1 = without;
  // availability 0 = available, 1 = missing
  std::array<std::array<std::array<std::int64_t, 2>, 2>, kFieldCount> counts{};
  std::int64_t unknown_excluded = 0;
};

struct YearlyControlPoint {
  int year = 0;
  std::int64_t with_control = 0;
  std::int64_t total = 0;
  double proportion = 0.0;  // with_control / total
};

struct YearlySeries {
  std::vector<YearlyControlPoint> points;  // ascending by year
  std::int64_t undated_excluded = 0;
};

// Integer-binned length counts over the quality-controlled subset, one
// histogram per length field (title/description word count, subject count).
struct LengthHistograms {
  std::array<std::map<int, std::int64_t>, 3> bins{};
  std::array<double, 3> mean{};
  std::array<std::int64_t, 3> samples{};
};

struct ExploreReport {
  AvailabilityCrosstab crosstab;
  YearlySeries yearly;
  LengthHistograms histograms;
  std::size_t corpus_size = 0;
  std::int64_t with_control = 0;
  std::int64_t without_control = 0;
};

AvailabilityCrosstab availability_crosstab(std::span<const OerRecord> records);

// Proportion of WithControl records per calendar year. The year comes from
// date_available, falling back to date_issued; records with neither are
// excluded and counted.
YearlySeries yearly_control_proportion(std::span<const OerRecord> records);

// Histograms over the WithControl subset only; absent fields contribute no
// sample.
LengthHistograms length_histograms(std::span<const OerRecord> records);

ExploreReport explore_corpus(std::span<const OerRecord> records);

// Writes availability_crosstab.csv, yearly_control.csv, length_histograms.csv
// and summary.csv into the directory (created if needed).
void write_explore_csv(const ExploreReport& report, const std::filesystem::path& directory);

// Static bar-chart rendering of each histogram (histogram_<field>.svg).
void write_explore_svg(const ExploreReport& report, const std::filesystem::path& directory);

}  // namespace metaqa
