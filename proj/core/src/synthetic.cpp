#include "metaqa/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "metaqa/mapping.hpp"

namespace metaqa {
namespace {

constexpr std::uint64_t kStreamOer = 11;
constexpr std::uint64_t kStreamVideo = 12;

const std::vector<std::string>& word_pool() {
  static const std::vector<std::string> words = {
      "data",        "analysis",    "systems",     "programming", "clinical",
      "health",      "care",        "network",     "security",    "learning",
      "management",  "database",    "cloud",       "nursing",     "technology",
      "medical",     "software",    "web",         "development", "patient",
      "research",    "statistics",  "design",      "practice",    "skills",
      "python",      "project",     "information", "science",     "guide",
      "course",      "module",      "unit",        "laboratory",  "safety",
      "workforce",   "training",    "application", "records",     "billing",
      "coding",      "terminology", "pharmacy",    "diagnostics", "operations",
      "spreadsheet", "server",      "hardware",    "support",     "visualization",
  };
  return words;
}

const std::vector<std::string>& subject_pool() {
  static const std::vector<std::string> subjects = {
      "databases",        "machine learning",   "public health",     "networking",
      "cybersecurity",    "nursing practice",   "data analysis",     "web development",
      "cloud computing",  "medical coding",     "pharmacology",      "anatomy",
      "statistics",       "programming",        "health informatics", "patient care",
      "medical billing",  "it support",         "software testing",  "emergency care",
      "phlebotomy",       "radiology",          "linux systems",     "project management",
  };
  return subjects;
}

const std::vector<std::string>& video_subject_pool() {
  static const std::vector<std::string> subjects = {
      // information technology topics
      "sql basics", "machine learning", "apache spark", "data mining", "big data",
      "data cleaning", "data visualization", "neural networks", "apache hadoop",
      "tensorflow", "python programming", "r programming", "statistics",
      "text mining", "data management", "cloud computing",
      // health care topics
      "bioethics", "infectious disease", "sleep disorders", "allergies",
      "vaccinations", "nutrition", "brain tumors", "cancer prevention",
      "sun awareness", "addiction recovery", "psychology", "stress management",
      "obesity care", "prostate cancer", "eye care", "smoking risks",
  };
  return subjects;
}

std::string pick(const std::vector<std::string>& pool, Rng& rng) {
  return pool[static_cast<std::size_t>(bounded(rng, pool.size()))];
}

std::string make_text(int words, Rng& rng) {
  std::string out;
  for (int i = 0; i < words; ++i) {
    if (i > 0) out.push_back(' ');
    out += pick(word_pool(), rng);
  }
  return out;
}

std::vector<std::string> make_subjects(int count, Rng& rng) {
  // duplicates allowed: subject_count counts entries, not distinct terms
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) out.push_back(pick(subject_pool(), rng));
  return out;
}

std::string format_url(const char* prefix, int i) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s%06d", prefix, i);
  return buf;
}

// Availability mask with an exact count of available slots: round(rate * n)
// shuffled into place.
std::vector<bool> exact_availability(std::size_t n, double rate, Rng& rng) {
  const auto k = static_cast<std::size_t>(
      std::clamp<long long>(std::llround(rate * static_cast<double>(n)), 0,
                            static_cast<long long>(n)));
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  shuffle(order, rng);
  std::vector<bool> mask(n, false);
  for (std::size_t i = 0; i < k; ++i) mask[static_cast<std::size_t>(order[i])] = true;
  return mask;
}

void fill_boolean_field(OerRecord& r, Field field, Rng& rng) {
  switch (field) {
    case Field::Level: {
      static const std::vector<std::string> levels = {"beginner", "intermediate", "advanced"};
      r.level = pick(levels, rng);
      break;
    }
    case Field::Language: {
      r.languages = {"en"};
      if (uniform01(rng) < 0.15) r.languages.push_back(uniform01(rng) < 0.5 ? "es" : "de");
      break;
    }
    case Field::TimeRequired: {
      static const std::vector<std::string> durations = {"45 minutes", "2 hours", "6 hours",
                                                         "2 weeks", "self-paced"};
      r.time_required = pick(durations, rng);
      break;
    }
    case Field::Accessibilities: {
      static const std::vector<std::string> options = {"captions", "transcript",
                                                       "screen reader", "high contrast"};
      r.accessibilities = {pick(options, rng)};
      if (uniform01(rng) < 0.3) {
        std::string extra = pick(options, rng);
        if (extra != r.accessibilities[0]) r.accessibilities.push_back(std::move(extra));
      }
      break;
    }
    default:
      break;
  }
}

// Generates one class with exact per-field availability counts and calibrated
// lengths; used for the WithControl class, whose statistics downstream checks
// pin to the planted targets.
std::vector<OerRecord> make_exact_class(std::size_t n, const ClassDistribution& dist,
                                        QualityControl label, Rng& rng) {
  std::vector<OerRecord> records(n);
  for (auto& r : records) r.quality_control = label;

  constexpr std::array<Field, 3> length_fields = {Field::Title, Field::Description,
                                                  Field::Subjects};
  for (std::size_t li = 0; li < length_fields.size(); ++li) {
    const Field field = length_fields[li];
    const auto mask = exact_availability(n, dist.availability[field_index(field)], rng);
    const auto available =
        static_cast<std::size_t>(std::count(mask.begin(), mask.end(), true));
    const auto lengths = sample_integer_lengths(available, dist.length_mean[li],
                                                dist.length_sd[li], 1, rng);
    std::size_t next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!mask[i]) continue;
      const int len = lengths[next++];
      switch (field) {
        case Field::Title: records[i].title = make_text(len, rng); break;
        case Field::Description: records[i].description = make_text(len, rng); break;
        case Field::Subjects: records[i].subjects = make_subjects(len, rng); break;
        default: break;
      }
    }
  }

  constexpr std::array<Field, 4> boolean_fields = {Field::Level, Field::Language,
                                                   Field::TimeRequired, Field::Accessibilities};
  for (Field field : boolean_fields) {
    const auto mask = exact_availability(n, dist.availability[field_index(field)], rng);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) fill_boolean_field(records[i], field, rng);
    }
  }
  return records;
}

// Per-record Bernoulli generation; used for the WithoutControl class, whose
// exact rates nothing downstream depends on.
OerRecord make_loose_record(const ClassDistribution& dist, QualityControl label, Rng& rng) {
  OerRecord r;
  r.quality_control = label;
  const auto draw_length = [&](std::size_t li) {
    const double value = dist.length_mean[li] + dist.length_sd[li] * normal01(rng);
    return static_cast<int>(std::max(1.0, std::round(value)));
  };
  if (uniform01(rng) < dist.availability[field_index(Field::Title)]) {
    r.title = make_text(draw_length(0), rng);
  }
  if (uniform01(rng) < dist.availability[field_index(Field::Description)]) {
    r.description = make_text(draw_length(1), rng);
  }
  if (uniform01(rng) < dist.availability[field_index(Field::Subjects)]) {
    r.subjects = make_subjects(draw_length(2), rng);
  }
  for (Field field : {Field::Level, Field::Language, Field::TimeRequired,
                      Field::Accessibilities}) {
    if (uniform01(rng) < dist.availability[field_index(field)]) {
      fill_boolean_field(r, field, rng);
    }
  }
  return r;
}

// Spreads dated records over the year range so the per-year control share
// falls linearly from first_year_control_share to last_year_control_share.
void assign_dates(std::vector<OerRecord*>& with_records,
                  std::vector<OerRecord*>& without_records,
                  const OerSynthesisConfig& cfg, Rng& rng) {
  const int years = cfg.last_year - cfg.first_year + 1;
  if (years <= 0) return;

  const auto plan_years = [&](std::size_t n, bool with) {
    std::vector<double> weight(static_cast<std::size_t>(years));
    double total = 0.0;
    for (int y = 0; y < years; ++y) {
      const double t = years == 1 ? 0.0 : static_cast<double>(y) / (years - 1);
      const double share = cfg.first_year_control_share +
                           t * (cfg.last_year_control_share - cfg.first_year_control_share);
      weight[static_cast<std::size_t>(y)] = with ? share : 1.0 - share;
      total += weight[static_cast<std::size_t>(y)];
    }
    // largest-remainder rounding to exactly n slots
    std::vector<std::size_t> quota(static_cast<std::size_t>(years), 0);
    std::vector<std::pair<double, int>> remainders;
    std::size_t assigned = 0;
    for (int y = 0; y < years; ++y) {
      const double exact = static_cast<double>(n) * weight[static_cast<std::size_t>(y)] / total;
      quota[static_cast<std::size_t>(y)] = static_cast<std::size_t>(exact);
      assigned += quota[static_cast<std::size_t>(y)];
      remainders.emplace_back(exact - std::floor(exact), y);
    }
    std::sort(remainders.rbegin(), remainders.rend());
    for (std::size_t i = 0; assigned < n; ++i, ++assigned) {
      ++quota[static_cast<std::size_t>(remainders[i % remainders.size()].second)];
    }
    return quota;
  };

  const auto apply = [&](std::vector<OerRecord*>& records, bool with) {
    std::vector<OerRecord*> dated = records;
    shuffle(dated, rng);
    const auto n_dated = static_cast<std::size_t>(
        std::llround(cfg.dated_share * static_cast<double>(dated.size())));
    dated.resize(n_dated);
    const auto quota = plan_years(n_dated, with);
    std::size_t next = 0;
    for (int y = 0; y < years; ++y) {
      for (std::size_t k = 0; k < quota[static_cast<std::size_t>(y)]; ++k) {
        OerRecord* r = dated[next++];
        const Date date{cfg.first_year + y, 1 + static_cast<int>(bounded(rng, 12)),
                        1 + static_cast<int>(bounded(rng, 28))};
        if (uniform01(rng) < 0.95) {
          r->date_available = date;
          if (uniform01(rng) < 0.4) r->date_issued = date;
        } else {
          r->date_issued = date;  // exercises the date_available fallback
        }
      }
    }
  };
  apply(with_records, true);
  apply(without_records, false);
}

}  // namespace

ClassDistribution default_with_control_distribution() {
  ClassDistribution dist;
  dist.availability = {1.00, 1.00, 0.86, 0.98, 0.92, 0.58, 0.59};
  dist.length_mean = {5.5, 54.5, 4.5};
  dist.length_sd = {2.5, 40.0, 3.5};
  return dist;
}

ClassDistribution default_without_control_distribution() {
  ClassDistribution dist;
  dist.availability = {0.97, 0.92, 0.52, 0.28, 0.56, 0.32, 0.30};
  dist.length_mean = {4.6, 38.0, 3.2};
  dist.length_sd = {2.6, 34.0, 2.6};
  return dist;
}

std::vector<OerRecord> synthesize_oer_corpus(const OerSynthesisConfig& config) {
  Rng rng = make_rng(config.seed, kStreamOer);

  std::vector<OerRecord> with_records =
      make_exact_class(static_cast<std::size_t>(config.with_control), config.with_params,
                       QualityControl::WithControl, rng);

  const auto n_without = static_cast<std::size_t>(config.without_control);
  const auto n_crossed = static_cast<std::size_t>(
      std::llround(config.crossover * static_cast<double>(n_without)));
  std::vector<OerRecord> without_records;
  without_records.reserve(n_without);
  for (std::size_t i = 0; i < n_without; ++i) {
    const auto& dist = i < n_crossed ? config.with_params : config.without_params;
    without_records.push_back(
        make_loose_record(dist, QualityControl::WithoutControl, rng));
  }

  {
    std::vector<OerRecord*> with_ptrs, without_ptrs;
    for (auto& r : with_records) with_ptrs.push_back(&r);
    for (auto& r : without_records) without_ptrs.push_back(&r);
    assign_dates(with_ptrs, without_ptrs, config, rng);
  }

  std::vector<OerRecord> corpus;
  corpus.reserve(with_records.size() + without_records.size());
  std::move(with_records.begin(), with_records.end(), std::back_inserter(corpus));
  std::move(without_records.begin(), without_records.end(), std::back_inserter(corpus));
  shuffle(corpus, rng);

  static const std::vector<std::string> types = {"course", "text", "video", "interactive"};
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    corpus[i].url = format_url("https://oer.example.org/records/", static_cast<int>(i));
    if (uniform01(rng) < 0.85) corpus[i].educational_type = pick(types, rng);
  }
  return corpus;
}

std::vector<VideoRecord> synthesize_video_corpus(const VideoSynthesisConfig& config) {
  Rng rng = make_rng(config.seed, kStreamVideo);

  std::vector<std::string> subjects = video_subject_pool();
  while (static_cast<int>(subjects.size()) < config.subjects) {
    subjects.push_back("topic " + std::to_string(subjects.size() + 1));
  }
  subjects.resize(static_cast<std::size_t>(config.subjects));

  std::vector<int> sizes(subjects.size(), config.min_per_subject);
  int remaining = config.videos - config.min_per_subject * config.subjects;
  while (remaining > 0) {
    ++sizes[static_cast<std::size_t>(bounded(rng, sizes.size()))];
    --remaining;
  }

  std::vector<VideoRecord> videos;
  videos.reserve(static_cast<std::size_t>(config.videos));
  int url_counter = 0;
  for (std::size_t s = 0; s < subjects.size(); ++s) {
    const double subject_rating = 3.9 + 0.5 * uniform01(rng);
    for (int i = 0; i < sizes[s]; ++i) {
      const bool rich = uniform01(rng) < config.rich_share;
      VideoRecord v;
      v.url = format_url("https://videos.example.org/watch/", url_counter++);

      const int title_words = 3 + static_cast<int>(bounded(rng, 6));
      std::string title = make_text(title_words, rng);
      const double keyword_share =
          rich ? config.rich_level_keyword_share : config.poor_level_keyword_share;
      if (uniform01(rng) < keyword_share) {
        title += ' ';
        title += pick(default_level_keywords(), rng);
      }
      v.title = std::move(title);

      const double desc_share =
          rich ? config.rich_description_share : config.poor_description_share;
      if (uniform01(rng) < desc_share) {
        const double mean = rich ? 50.0 : 16.0;
        const double sd = rich ? 25.0 : 10.0;
        const int words =
            static_cast<int>(std::max(3.0, std::round(mean + sd * normal01(rng))));
        v.description = make_text(words, rng);
      }

      v.subjects = {subjects[s]};
      v.length_seconds = 120 + static_cast<std::int64_t>(bounded(rng, 5280));
      v.views = static_cast<std::int64_t>(
          std::llround(std::exp(std::log(500.0) + 2.2 * normal01(rng))) + 10);
      v.likes = static_cast<std::int64_t>(
          std::llround(static_cast<double>(v.views) * (0.008 + 0.05 * uniform01(rng))));

      double rating = subject_rating + (rich ? config.rating_gap : 0.0) +
                      config.rating_noise * normal01(rng);
      rating = std::clamp(rating, 1.0, 5.0);
      v.rating = std::round(rating * 100.0) / 100.0;
      v.dislikes = static_cast<std::int64_t>(std::llround(
          static_cast<double>(v.likes) * (0.02 + 0.2 * uniform01(rng)) * (5.0 - rating) / 5.0));
      videos.push_back(std::move(v));
    }
  }
  return videos;
}

std::vector<int> sample_integer_lengths(std::size_t n, double mean, double sd, int min_value,
                                        Rng& rng) {
  std::vector<int> out(n);
  if (n == 0) return out;
  if (n == 1 || sd <= 0.0) {
    const int v = std::max(min_value, static_cast<int>(std::llround(mean)));
    std::fill(out.begin(), out.end(), v);
    return out;
  }

  std::vector<double> z(n);
  for (auto& v : z) v = normal01(rng);
  double z_mean = 0.0;
  for (double v : z) z_mean += v;
  z_mean /= static_cast<double>(n);
  double z_ss = 0.0;
  for (double v : z) z_ss += (v - z_mean) * (v - z_mean);
  const double z_sd = std::sqrt(z_ss / static_cast<double>(n - 1));
  for (auto& v : z) v = (v - z_mean) / z_sd;  // exact mean 0, sd 1

  // Rounding and clamping bias the sample moments; shift and rescale until
  // the realized integer sample hits the targets.
  double m = mean, s = sd;
  for (int iter = 0; iter < 60; ++iter) {
    for (std::size_t i = 0; i < n; ++i) {
      out[i] = std::max(min_value, static_cast<int>(std::llround(m + s * z[i])));
    }
    double y_mean = 0.0;
    for (int v : out) y_mean += static_cast<double>(v);
    y_mean /= static_cast<double>(n);
    double y_ss = 0.0;
    for (int v : out) y_ss += (static_cast<double>(v) - y_mean) * (static_cast<double>(v) - y_mean);
    const double y_sd = std::sqrt(y_ss / static_cast<double>(n - 1));

    const bool mean_ok = std::abs(y_mean - mean) < 0.02;
    const bool sd_ok = std::abs(y_sd - sd) < std::max(0.02, 0.005 * sd);
    if (mean_ok && sd_ok) break;
    m += mean - y_mean;
    if (y_sd > 0.0) s *= std::clamp(sd / y_sd, 0.5, 2.0);
    s = std::clamp(s, 0.05 * sd, 20.0 * sd);
  }
  return out;
}

}  // namespace metaqa
