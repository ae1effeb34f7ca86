#include "metaqa/validate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "metaqa/csv.hpp"
#include "metaqa/errors.hpp"
#include "metaqa/io.hpp"

namespace metaqa {

std::string_view diff_sign_name(DiffSign sign) {
  switch (sign) {
    case DiffSign::Positive: return "+";
    case DiffSign::Negative: return "-";
    case DiffSign::Zero: return "0";
  }
  return "0";
}

ValidationReport validate_by_subject(std::span<const VideoRecord> videos,
                                     const ForestModel& model, const ProfileSet& profiles,
                                     const MappingRules& rules) {
  struct Accumulator {
    double sum_with = 0.0, sum_without = 0.0;
    std::int64_t n_with = 0, n_without = 0;
  };
  std::map<std::string, Accumulator> by_subject;

  ValidationReport report;
  for (const auto& video : videos) {
    const OerRecord mapped = video_to_oer(video, rules);
    const LabeledFeatures row = extract_features(mapped, profiles);
    const auto [label, confidence] = predict(model, row.features);
    (void)confidence;
    const bool with = label == QualityControl::WithControl;
    (with ? report.summary.predicted_with : report.summary.predicted_without) += 1;
    for (const auto& subject : video.subjects) {
      auto& acc = by_subject[subject];
      if (with) {
        acc.sum_with += video.rating;
        ++acc.n_with;
      } else {
        acc.sum_without += video.rating;
        ++acc.n_without;
      }
    }
  }

  double diff_sum = 0.0;
  std::int64_t valid_rows = 0;
  report.rows.reserve(by_subject.size());
  for (const auto& [subject, acc] : by_subject) {
    SubjectValidationRow row;
    row.subject = subject;
    row.n_with = acc.n_with;
    row.n_without = acc.n_without;
    if (acc.n_with > 0) row.mean_rating_with = acc.sum_with / static_cast<double>(acc.n_with);
    if (acc.n_without > 0) {
      row.mean_rating_without = acc.sum_without / static_cast<double>(acc.n_without);
    }
    if (row.valid()) {
      row.rating_difference = *row.mean_rating_with - *row.mean_rating_without;
      row.sign = row.rating_difference > 0.0   ? DiffSign::Positive
                 : row.rating_difference < 0.0 ? DiffSign::Negative
                                               : DiffSign::Zero;
      diff_sum += row.rating_difference;
      ++valid_rows;
      switch (row.sign) {
        case DiffSign::Positive: ++report.summary.positive; break;
        case DiffSign::Negative: ++report.summary.negative; break;
        case DiffSign::Zero: ++report.summary.zero; break;
      }
    } else {
      row.sign = DiffSign::Zero;
      ++report.summary.skipped;
    }
    report.rows.push_back(std::move(row));
  }

  report.summary.subjects = report.rows.size();
  if (valid_rows > 0) {
    report.summary.average_difference = diff_sum / static_cast<double>(valid_rows);
    report.summary.has_average = true;
  }

  std::sort(report.rows.begin(), report.rows.end(),
            [](const SubjectValidationRow& a, const SubjectValidationRow& b) {
              if (a.valid() != b.valid()) return a.valid();
              if (a.rating_difference != b.rating_difference) {
                return a.rating_difference > b.rating_difference;
              }
              return a.subject < b.subject;
            });
  return report;
}

double rating_std(std::span<const VideoRecord> videos) {
  if (videos.size() < 2) {
    throw FatalError("rating standard deviation needs at least two videos");
  }
  double mean = 0.0;
  for (const auto& v : videos) mean += v.rating;
  mean /= static_cast<double>(videos.size());
  double ss = 0.0;
  for (const auto& v : videos) {
    const double d = v.rating - mean;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(videos.size() - 1));
}

void write_validation_csv(const ValidationReport& report, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot open " + path.string() + " for writing");
  out << "subject,rating_difference,sign,n_with,n_without\n";
  for (const auto& row : report.rows) {
    out << csv_escape(row.subject) << ','
        << (row.valid() ? format_double(row.rating_difference) : "") << ','
        << diff_sign_name(row.sign) << ',' << row.n_with << ',' << row.n_without << '\n';
  }
  out << "Average,"
      << (report.summary.has_average ? format_double(report.summary.average_difference) : "")
      << ','
      << (report.summary.has_average && report.summary.average_difference > 0.0   ? "+"
          : report.summary.has_average && report.summary.average_difference < 0.0 ? "-"
                                                                                  : "0")
      << ',' << report.summary.predicted_with << ',' << report.summary.predicted_without
      << '\n';
}

}  // namespace metaqa
