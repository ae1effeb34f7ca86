#include "metaqa/explore.hpp"

#include <algorithm>
#include <fstream>
#include <map>

#include "metaqa/errors.hpp"
#include "metaqa/io.hpp"

namespace metaqa {
namespace {

constexpr std::array<Field, 3> kLengthFields = {Field::Title, Field::Description,
                                                Field::Subjects};

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

AvailabilityCrosstab availability_crosstab(std::span<const OerRecord> records) {
  AvailabilityCrosstab tab;
  for (const auto& record : records) {
    if (record.quality_control == QualityControl::Unknown) {
      ++tab.unknown_excluded;
      continue;
    }
    const std::size_t control = record.quality_control == QualityControl::WithControl ? 0 : 1;
    for (Field f : kAllFields) {
      const std::size_t missing = field_available(record, f) ? 0 : 1;
      ++tab.counts[static_cast<std::size_t>(field_index(f))][control][missing];
    }
  }
  return tab;
}

YearlySeries yearly_control_proportion(std::span<const OerRecord> records) {
  YearlySeries series;
  std::map<int, std::pair<std::int64_t, std::int64_t>> by_year;  // year -> (with, total)
  for (const auto& record : records) {
    const auto& date = record.date_available ? record.date_available : record.date_issued;
    if (!date) {
      ++series.undated_excluded;
      continue;
    }
    auto& [with, total] = by_year[date->year];
    ++total;
    if (record.quality_control == QualityControl::WithControl) ++with;
  }
  series.points.reserve(by_year.size());
  for (const auto& [year, counts] : by_year) {
    series.points.push_back(YearlyControlPoint{
        year, counts.first, counts.second,
        static_cast<double>(counts.first) / static_cast<double>(counts.second)});
  }
  return series;
}

LengthHistograms length_histograms(std::span<const OerRecord> records) {
  LengthHistograms hist;
  for (const auto& record : records) {
    if (record.quality_control != QualityControl::WithControl) continue;
    for (std::size_t i = 0; i < kLengthFields.size(); ++i) {
      if (const auto len = field_length(record, kLengthFields[i])) {
        ++hist.bins[i][*len];
        hist.mean[i] += static_cast<double>(*len);
        ++hist.samples[i];
      }
    }
  }
  for (std::size_t i = 0; i < hist.mean.size(); ++i) {
    if (hist.samples[i] > 0) hist.mean[i] /= static_cast<double>(hist.samples[i]);
  }
  return hist;
}

ExploreReport explore_corpus(std::span<const OerRecord> records) {
  ExploreReport report;
  report.corpus_size = records.size();
  for (const auto& record : records) {
    if (record.quality_control == QualityControl::WithControl) ++report.with_control;
    if (record.quality_control == QualityControl::WithoutControl) ++report.without_control;
  }
  report.crosstab = availability_crosstab(records);
  report.yearly = yearly_control_proportion(records);
  report.histograms = length_histograms(records);
  return report;
}

void write_explore_csv(const ExploreReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);

  {
    auto out = open_output(directory / "availability_crosstab.csv");
    out << "field,with_control_available,with_control_missing,"
           "without_control_available,without_control_missing\n";
    for (Field f : kAllFields) {
      const auto& c = report.crosstab.counts[static_cast<std::size_t>(field_index(f))];
      out << field_name(f) << ',' << c[0][0] << ',' << c[0][1] << ',' << c[1][0] << ','
          << c[1][1] << '\n';
    }
  }
  {
    auto out = open_output(directory / "yearly_control.csv");
    out << "year,with_control,total,proportion\n";
    for (const auto& point : report.yearly.points) {
      out << point.year << ',' << point.with_control << ',' << point.total << ','
          << format_double(point.proportion) << '\n';
    }
  }
  {
    auto out = open_output(directory / "length_histograms.csv");
    out << "field,length,count\n";
    for (std::size_t i = 0; i < kLengthFields.size(); ++i) {
      for (const auto& [length, count] : report.histograms.bins[i]) {
        out << field_name(kLengthFields[i]) << ',' << length << ',' << count << '\n';
      }
    }
  }
  {
    auto out = open_output(directory / "summary.csv");
    out << "metric,value\n";
    out << "corpus_size," << report.corpus_size << '\n';
    out << "with_control," << report.with_control << '\n';
    out << "without_control," << report.without_control << '\n';
    out << "unknown_label," << report.crosstab.unknown_excluded << '\n';
    out << "undated_excluded," << report.yearly.undated_excluded << '\n';
    for (std::size_t i = 0; i < kLengthFields.size(); ++i) {
      out << "mean_" << field_name(kLengthFields[i]) << "_length,"
          << format_double(report.histograms.mean[i]) << '\n';
    }
    if (!report.yearly.points.empty()) {
      out << "first_year_proportion," << format_double(report.yearly.points.front().proportion)
          << '\n';
      out << "last_year_proportion," << format_double(report.yearly.points.back().proportion)
          << '\n';
    }
  }
}

namespace {

// Minimal standalone bar chart; enough to eyeball a distribution.
void write_histogram_svg(const std::map<int, std::int64_t>& bins, std::string_view title,
                         const std::filesystem::path& path) {
  auto out = open_output(path);
  const int width = 640, height = 400, margin = 40;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\">\n";
  out << "<text x=\"" << width / 2 << "\" y=\"20\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"14\">" << title << "</text>\n";
  if (!bins.empty()) {
    const int min_len = bins.begin()->first;
    const int max_len = bins.rbegin()->first;
    std::int64_t max_count = 1;
    for (const auto& [len, count] : bins) max_count = std::max(max_count, count);
    const int slots = max_len - min_len + 1;
    const double bar_w = static_cast<double>(width - 2 * margin) / slots;
    const double scale = static_cast<double>(height - 2 * margin) / static_cast<double>(max_count);
    for (const auto& [len, count] : bins) {
      const double x = margin + (len - min_len) * bar_w;
      const double h = static_cast<double>(count) * scale;
      out << "<rect x=\"" << x << "\" y=\"" << (height - margin - h) << "\" width=\""
          << bar_w * 0.9 << "\" height=\"" << h << "\" fill=\"#4878a8\"/>\n";
    }
    out << "<text x=\"" << margin << "\" y=\"" << height - margin + 16
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << min_len << "</text>\n";
    out << "<text x=\"" << width - margin << "\" y=\"" << height - margin + 16
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << max_len
        << "</text>\n";
  }
  out << "</svg>\n";
}

}  // namespace

void write_explore_svg(const ExploreReport& report, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  for (std::size_t i = 0; i < kLengthFields.size(); ++i) {
    const auto name = std::string(field_name(kLengthFields[i]));
    write_histogram_svg(report.histograms.bins[i], name + " length distribution",
                        directory / ("histogram_" + name + ".svg"));
  }
}

}  // namespace metaqa
