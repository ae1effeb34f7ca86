#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "metaqa/field.hpp"
#include "metaqa/record.hpp"
#include "metaqa/rng.hpp"

namespace metaqa {

// Generation parameters for one quality-control class: per-field availability
// shares and length targets (title/description word count, subject count).
struct ClassDistribution {
  std::array<double, kFieldCount> availability{};
  std::array<double, 3> length_mean{};
  std::array<double, 3> length_sd{};
};

// The shipped defaults reproduce the toolkit's built-in benchmark profile on
// the generated WithControl subset.
ClassDistribution default_with_control_distribution();
ClassDistribution default_without_control_distribution();

struct OerSynthesisConfig {
  int with_control = 4651;
  int without_control = 4236;
  std::uint64_t seed = 42;
  ClassDistribution with_params = default_with_control_distribution();
  ClassDistribution without_params = default_without_control_distribution();
  // Share of WithoutControl records drawn from the WithControl distribution.
  // Raises class overlap without disturbing the controlled subset's
  // statistics, which the profiler tests pin down exactly.
  double crossover = 0.07;
  int first_year = 2012;
  int last_year = 2020;
  // Planted yearly control share, linear between these two values.
  double first_year_control_share = 0.78;
  double last_year_control_share = 0.28;
  double dated_share = 0.97;
};

// Deterministic corpus with exact per-field availability counts on the
// WithControl class (k = round(rate * n) records available per field) and
// calibrated integer length distributions. Record order is shuffled.
std::vector<OerRecord> synthesize_oer_corpus(const OerSynthesisConfig& config = {});

struct VideoSynthesisConfig {
  int videos = 884;
  int subjects = 32;
  int min_per_subject = 10;
  std::uint64_t seed = 42;
  double rich_share = 0.55;                // videos generated with rich metadata
  double rating_gap = 0.10;                // extra mean rating for rich videos
  double rating_noise = 0.21;              // within-group rating spread
  double rich_level_keyword_share = 0.85;  // rich titles carrying a level keyword
  double poor_level_keyword_share = 0.08;
  double rich_description_share = 0.95;
  double poor_description_share = 0.50;
};

// Video corpus split into rich/poor metadata tiers; rich videos' ratings are
// drawn rating_gap higher on average.
std::vector<VideoRecord> synthesize_video_corpus(const VideoSynthesisConfig& config = {});

// n integer samples clamped to >= min_value whose sample mean and sample
// standard deviation land within ~0.1 of the targets (iterative affine
// correction absorbs rounding and clamping bias).
std::vector<int> sample_integer_lengths(std::size_t n, double mean, double sd, int min_value,
                                        Rng& rng);

}  // namespace metaqa
