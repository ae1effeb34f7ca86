#include <doctest.h>

#include <cmath>

#include "metaqa/errors.hpp"
#include "metaqa/synthetic.hpp"
#include "metaqa/validate.hpp"
#include "test_support.hpp"

using namespace metaqa;

namespace {

VideoRecord video(std::string url, std::string title, double rating,
                  std::string subject = "topic") {
  VideoRecord v;
  v.url = std::move(url);
  v.title = std::move(title);
  v.rating = rating;
  v.length_seconds = 600;
  v.subjects = {std::move(subject)};
  return v;
}

// Stump voting WithControl exactly when level_available (feature 2) is set;
// makes predicted groups fully controllable from video titles.
ForestModel level_stump_model() {
  Tree stump(3);
  stump[0].feature = 2;
  stump[0].threshold = 0.5;
  stump[0].left = 1;
  stump[0].right = 2;
  stump[1].feature = -1;
  stump[1].counts = {9, 0};
  stump[2].feature = -1;
  stump[2].counts = {0, 9};

  ForestModel model;
  model.params.n_trees = 1;
  model.trees = {stump};
  for (const auto& name : feature_names()) model.feature_names.push_back(name);
  model.importances = {0, 0, 1, 0, 0, 0};
  return model;
}

}  // namespace

TEST_CASE("video mapping marks derived fields") {
  VideoRecord v = video("v1", "Python for Beginners", 4.5);
  v.description = "learn python";
  const OerRecord mapped = video_to_oer(v);

  CHECK(mapped.url == "v1");
  CHECK(mapped.title == "Python for Beginners");
  CHECK(mapped.description == "learn python");
  CHECK(mapped.subjects == std::vector<std::string>{"topic"});
  CHECK(mapped.level.has_value());            // "Beginners" matches "beginner"
  CHECK(mapped.time_required == "600s");      // every video has a length
  CHECK(mapped.languages.empty());            // default rules leave language absent
  CHECK(mapped.accessibilities.empty());
  CHECK(mapped.quality_control == QualityControl::Unknown);
}

TEST_CASE("titles without level keywords map to absent level") {
  const OerRecord mapped = video_to_oer(video("v2", "Apache Spark Tutorial", 4.0));
  CHECK_FALSE(mapped.level.has_value());
  CHECK(mapped.time_required.has_value());
}

TEST_CASE("empty subject lists survive the mapping") {
  VideoRecord v = video("v3", "Some Title", 3.0);
  v.subjects.clear();
  CHECK(video_to_oer(v).subjects.empty());
}

TEST_CASE("keyword matching is a case-insensitive token prefix") {
  const auto& keywords = default_level_keywords();
  CHECK(title_matches_level_keyword("SQL 101: queries", keywords));
  CHECK(title_matches_level_keyword("An INTRODUCTION to R", keywords));
  CHECK(title_matches_level_keyword("Advanced topics", keywords));
  CHECK_FALSE(title_matches_level_keyword("Spark deep dive", keywords));
  CHECK_FALSE(title_matches_level_keyword("Reintroduction of wolves", keywords));
  CHECK(matched_level_keyword("The Basics of nursing", keywords) == "basics");

  const std::vector<std::string> custom = {"survey"};
  CHECK(title_matches_level_keyword("A Survey of ML", custom));
  CHECK_FALSE(title_matches_level_keyword("Advanced topics", custom));
}

TEST_CASE("rating standard deviation") {
  CHECK(rating_std(std::vector<VideoRecord>{video("a", "t", 0.5), video("b", "t", 1.0)}) ==
        doctest::Approx(0.3536).epsilon(1e-3));
  CHECK(rating_std(std::vector<VideoRecord>{video("a", "t", 2.0), video("b", "t", 2.0),
                                            video("c", "t", 2.0)}) == 0.0);
  CHECK_THROWS_AS(rating_std(std::vector<VideoRecord>{video("a", "t", 1.0)}), FatalError);
}

TEST_CASE("per-subject validation compares predicted group means") {
  const ForestModel model = level_stump_model();
  const ProfileSet profiles = builtin_profile_set();

  std::vector<VideoRecord> videos;
  // subject "alpha": keyword titles rated 0.8, plain titles rated 0.7
  for (int i = 0; i < 3; ++i) {
    videos.push_back(video("a" + std::to_string(i), "Intro to X", 0.8, "alpha"));
    videos.push_back(video("b" + std::to_string(i), "Plain talk", 0.7, "alpha"));
  }
  // subject "beta": both groups rate identically
  videos.push_back(video("c0", "Basics of Y", 0.6, "beta"));
  videos.push_back(video("c1", "Just Y", 0.6, "beta"));

  const auto report = validate_by_subject(videos, model, profiles);
  REQUIRE(report.rows.size() == 2);

  const auto& alpha = report.rows[0];  // sorted by difference descending
  CHECK(alpha.subject == "alpha");
  CHECK(alpha.n_with == 3);
  CHECK(alpha.n_without == 3);
  CHECK(alpha.rating_difference == doctest::Approx(0.1));
  CHECK(alpha.sign == DiffSign::Positive);
  CHECK(alpha.n_with + alpha.n_without == 6);

  const auto& beta = report.rows[1];
  CHECK(beta.subject == "beta");
  CHECK(beta.rating_difference == doctest::Approx(0.0));
  CHECK(beta.sign == DiffSign::Zero);

  CHECK(report.summary.positive == 1);
  CHECK(report.summary.zero == 1);
  CHECK(report.summary.skipped == 0);
  CHECK(report.summary.average_difference == doctest::Approx(0.05));
  CHECK(report.summary.predicted_with == 4);
  CHECK(report.summary.predicted_without == 4);
}

TEST_CASE("subjects with an empty predicted group are reported but not tallied") {
  const ForestModel model = level_stump_model();
  const ProfileSet profiles = builtin_profile_set();
  std::vector<VideoRecord> videos = {
      video("a", "Intro one", 0.9, "solo"),
      video("b", "Intro two", 0.8, "solo"),  // every "solo" video lands WithControl
      video("c", "Intro three", 0.5, "pair"),
      video("d", "No keyword here", 0.4, "pair"),
  };
  const auto report = validate_by_subject(videos, model, profiles);
  REQUIRE(report.rows.size() == 2);

  const auto& pair_row = report.rows[0];
  CHECK(pair_row.subject == "pair");
  CHECK(pair_row.valid());
  const auto& solo = report.rows[1];
  CHECK(solo.subject == "solo");
  CHECK_FALSE(solo.valid());
  CHECK(solo.sign == DiffSign::Zero);
  CHECK(solo.n_with == 2);
  CHECK(solo.n_without == 0);

  CHECK(report.summary.skipped == 1);
  CHECK(report.summary.positive == 1);
  // the average covers valid rows only
  CHECK(report.summary.average_difference == doctest::Approx(0.1));
}

TEST_CASE("summary average equals the unweighted mean of valid rows") {
  const ForestModel model = level_stump_model();
  const ProfileSet profiles = builtin_profile_set();
  std::vector<VideoRecord> videos;
  const std::vector<std::pair<double, double>> gaps = {
      {0.9, 0.7}, {0.5, 0.6}, {0.8, 0.8}, {1.0, 0.5}};
  for (std::size_t s = 0; s < gaps.size(); ++s) {
    const std::string subject = "s" + std::to_string(s);
    videos.push_back(video(subject + "w", "Intro talk", gaps[s].first, subject));
    videos.push_back(video(subject + "o", "Plain talk", gaps[s].second, subject));
  }
  const auto report = validate_by_subject(videos, model, profiles);
  double expected = 0.0;
  for (const auto& [w, o] : gaps) expected += w - o;
  expected /= static_cast<double>(gaps.size());
  CHECK(report.summary.average_difference == doctest::Approx(expected));
  CHECK(report.summary.positive == 2);
  CHECK(report.summary.negative == 1);
  CHECK(report.summary.zero == 1);

  // every video carrying a subject lands in exactly one group of its row
  for (const auto& row : report.rows) {
    CHECK(row.n_with + row.n_without == 2);
  }
}

TEST_CASE("validation csv mirrors the table with an average row") {
  TempDir dir("validation_csv");
  const ForestModel model = level_stump_model();
  const std::vector<VideoRecord> videos = {
      video("a", "Intro one", 0.9, "alpha"),
      video("b", "Plain", 0.7, "alpha"),
  };
  const auto report = validate_by_subject(videos, model, builtin_profile_set());
  write_validation_csv(report, dir.file("validation.csv"));
  const std::string csv = read_text(dir.file("validation.csv"));
  CHECK(csv.find("subject,rating_difference,sign,n_with,n_without\n") == 0);
  CHECK(csv.find("alpha,") != std::string::npos);
  CHECK(csv.find("Average,") != std::string::npos);
  CHECK(csv.find(",+,") != std::string::npos);
}
