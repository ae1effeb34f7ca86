#include <doctest.h>

#include <sstream>

#include "metaqa/csv.hpp"
#include "metaqa/errors.hpp"
#include "metaqa/io.hpp"
#include "metaqa/synthetic.hpp"
#include "test_support.hpp"

using namespace metaqa;

TEST_CASE("csv reader handles quoting, separators and line endings") {
  std::istringstream in(
      "a,b,c\r\n"
      "1,\"two, with comma\",3\n"
      "\"multi\nline\",\"quote \"\"q\"\"\",\n"
      "\n"
      "last,row,here");
  CsvReader reader(in);
  std::vector<std::string> row;

  REQUIRE(reader.next_row(row));
  CHECK(row == std::vector<std::string>{"a", "b", "c"});
  REQUIRE(reader.next_row(row));
  CHECK(row == std::vector<std::string>{"1", "two, with comma", "3"});
  REQUIRE(reader.next_row(row));
  CHECK(row == std::vector<std::string>{"multi\nline", "quote \"q\"", ""});
  REQUIRE(reader.next_row(row));
  CHECK(row == std::vector<std::string>{"last", "row", "here"});
  CHECK_FALSE(reader.next_row(row));
}

TEST_CASE("csv escape round-trips through the reader") {
  const std::vector<std::string> fields = {"plain", "with,comma", "with\"quote", "with\nnewline",
                                           ""};
  std::ostringstream out;
  write_csv_row(out, fields);
  std::istringstream in(out.str());
  CsvReader reader(in);
  std::vector<std::string> row;
  REQUIRE(reader.next_row(row));
  CHECK(row == fields);
}

TEST_CASE("oer csv parsing maps missing values to canonical absent") {
  TempDir dir("oer_csv");
  write_text(dir.file("corpus.csv"),
             "url,title,description,subjects,level,time_required,accessibilities,languages,"
             "quality_control\n"
             "u1,Intro to SQL,A short course,sql|databases,beginner,2 hours,captions,en,"
             "with control\n"
             "u2,Data Basics,Another course,data,,3 hours,,en|es,without control\n"
             "u3,Care 101,Text,health,advanced,1 week,transcript,en,with control\n");
  const auto result = parse_oer_corpus(dir.file("corpus.csv"), CorpusFormat::Csv);

  REQUIRE(result.records.size() == 3);
  CHECK(result.stats.accepted == 3);
  CHECK(result.stats.malformed == 0);
  CHECK(result.manifest.record_count == 3);

  const auto& r2 = result.records[1];
  CHECK(r2.url == "u2");
  CHECK_FALSE(r2.level.has_value());
  CHECK(r2.languages == std::vector<std::string>{"en", "es"});
  CHECK(r2.quality_control == QualityControl::WithoutControl);
  CHECK(result.records[0].subjects == std::vector<std::string>{"sql", "databases"});
}

TEST_CASE("oer csv with header only yields an empty corpus") {
  TempDir dir("oer_empty");
  write_text(dir.file("corpus.csv"), "url,title,quality_control\n");
  const auto result = parse_oer_corpus(dir.file("corpus.csv"), CorpusFormat::Csv);
  CHECK(result.records.empty());
  CHECK(result.manifest.record_count == 0);
  CHECK(result.manifest.fields_present.empty());
}

TEST_CASE("malformed oer rows are skipped and counted") {
  TempDir dir("oer_malformed");
  std::string csv = "url,title,quality_control\n";
  for (int i = 0; i < 20; ++i) csv += "u" + std::to_string(i) + ",t,with control\n";
  csv += "broken,row,with,too,many,columns\n";
  csv += ",missing url,with control\n";
  write_text(dir.file("corpus.csv"), csv);

  const auto result = parse_oer_corpus(dir.file("corpus.csv"), CorpusFormat::Csv);
  CHECK(result.records.size() == 20);
  CHECK(result.stats.total_rows == 22);
  CHECK(result.stats.malformed == 2);
  CHECK(result.stats.accepted + result.stats.malformed + result.stats.rejected ==
        result.stats.total_rows);
  CHECK(result.stats.messages.size() == 2);
}

TEST_CASE("over 10 percent malformed rows is a fatal corpus error") {
  TempDir dir("oer_fatal");
  write_text(dir.file("corpus.csv"),
             "url,title\n"
             "u1,ok\n"
             "u2,ok\n"
             "bad,row,extra\n");
  CHECK_THROWS_AS(parse_oer_corpus(dir.file("corpus.csv"), CorpusFormat::Csv), FatalError);
}

TEST_CASE("unreadable corpus file is fatal and names the path") {
  try {
    parse_oer_corpus("/nonexistent/corpus.csv", CorpusFormat::Csv);
    FAIL("expected FatalError");
  } catch (const FatalError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/corpus.csv") != std::string::npos);
  }
}

TEST_CASE("video parsing rejects invariant-violating records") {
  TempDir dir("video_csv");
  write_text(dir.file("videos.csv"),
             "url,title,description,dislikes,length_seconds,likes,rating,subjects,views\n"
             "v1,Python for Beginners,desc,0,600,10,5.0,python,1000\n"
             "v2,Too good,desc,0,600,10,6.1,python,1000\n"
             "v3,Negative,desc,-3,600,10,4.0,python,1000\n"
             "v4,Bad number,desc,x,600,10,4.0,python,1000\n");
  const auto result = parse_video_corpus(dir.file("videos.csv"), CorpusFormat::Csv);

  REQUIRE(result.records.size() == 1);
  CHECK(result.records[0].url == "v1");
  CHECK(result.records[0].rating == 5.0);
  CHECK(result.stats.rejected == 2);   // rating range, negative count
  CHECK(result.stats.malformed == 1);  // unparseable number
  CHECK(result.stats.accepted + result.stats.rejected + result.stats.malformed ==
        result.stats.total_rows);
}

TEST_CASE("jsonl ingestion accepts raw and canonical record lines") {
  TempDir dir("oer_jsonl");
  write_text(dir.file("corpus.jsonl"),
             "{\"url\":\"u1\",\"title\":\"Intro to SQL\",\"quality_control\":\"with control\"}\n"
             "{\"url\":\"u2\",\"subjects\":[\"sql\",\"\"],\"languages\":[]}\n"
             "not json at all\n");
  const auto result = parse_oer_corpus(dir.file("corpus.jsonl"), CorpusFormat::Jsonl);
  REQUIRE(result.records.size() == 2);
  CHECK(result.records[0].quality_control == QualityControl::WithControl);
  CHECK(result.records[1].subjects == std::vector<std::string>{"sql"});
  CHECK(result.records[1].quality_control == QualityControl::Unknown);
  CHECK(result.stats.malformed == 1);
}

TEST_CASE("canonical oer records round-trip exactly") {
  TempDir dir("oer_roundtrip");
  const auto corpus = synthesize_oer_corpus(OerSynthesisConfig{
      .with_control = 40, .without_control = 30, .seed = 9});
  write_oer_records(dir.file("records.jsonl"), corpus, CorpusSource::SkillsCommons);
  const auto [loaded, manifest] = read_oer_records(dir.file("records.jsonl"));
  CHECK(loaded == corpus);
  CHECK(manifest.source == CorpusSource::SkillsCommons);
  CHECK(manifest.record_count == corpus.size());

  // parsing is deterministic: same bytes, same records
  const auto again = read_oer_records(dir.file("records.jsonl"));
  CHECK(again.first == loaded);
}

TEST_CASE("canonical video records round-trip exactly") {
  TempDir dir("video_roundtrip");
  const auto videos = synthesize_video_corpus(VideoSynthesisConfig{
      .videos = 50, .subjects = 4, .min_per_subject = 5, .seed = 11});
  write_video_records(dir.file("videos.jsonl"), videos);
  const auto [loaded, manifest] = read_video_records(dir.file("videos.jsonl"));
  CHECK(loaded == videos);
  CHECK(manifest.record_count == videos.size());
}

TEST_CASE("truncated records file is detected") {
  TempDir dir("truncated_records");
  const auto corpus = synthesize_oer_corpus(OerSynthesisConfig{
      .with_control = 10, .without_control = 5, .seed = 3});
  write_oer_records(dir.file("records.jsonl"), corpus);
  std::string text = read_text(dir.file("records.jsonl"));
  text.resize(text.rfind('\n', text.size() - 2) + 1);  // drop the last record
  write_text(dir.file("cut.jsonl"), text);
  CHECK_THROWS_AS(read_oer_records(dir.file("cut.jsonl")), FatalError);
}

TEST_CASE("profile files round-trip and reject foreign formats") {
  TempDir dir("profile_io");
  const ProfileSet builtin = builtin_profile_set();
  write_profile_set(dir.file("profile.json"), builtin, make_provenance("test", 1));
  const ProfileSet loaded = read_profile_set(dir.file("profile.json"));
  CHECK(loaded == builtin);

  // full-precision parameters survive the round trip bit for bit
  ProfileSet precise = builtin;
  precise.profiles[0].rating_fn = NormalFit{5.437281941278312, 2.5012938172631, false};
  write_profile_set(dir.file("precise.json"), precise, make_provenance("test", 1));
  CHECK(read_profile_set(dir.file("precise.json")) == precise);

  try {
    read_forest_model(dir.file("profile.json"));
    FAIL("expected FatalError");
  } catch (const FatalError& e) {
    const std::string what = e.what();
    CHECK(what.find("metaqa-model/1") != std::string::npos);
    CHECK(what.find("metaqa-profile/1") != std::string::npos);
  }
}

namespace {

std::vector<LabeledFeatures> fixture_features(int n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  std::vector<LabeledFeatures> rows;
  rows.reserve(n);
  for (int i = 0; i < n; ++i) {
    LabeledFeatures row;
    row.url = "r" + std::to_string(i);
    const bool with = i % 2 == 0;
    row.features = {uniform01(rng) * (with ? 1.0 : 0.6),
                    uniform01(rng) * (with ? 0.9 : 0.4),
                    static_cast<double>(bounded(rng, 2)),
                    static_cast<double>(bounded(rng, 80)),
                    static_cast<double>(bounded(rng, 12)),
                    static_cast<double>(bounded(rng, 9))};
    row.label = with ? QualityControl::WithControl : QualityControl::WithoutControl;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

TEST_CASE("model files round-trip with identical predictions") {
  TempDir dir("model_io");
  const auto data = fixture_features(60, 21);
  ForestParams params;
  params.n_trees = 100;
  const ForestModel model = train_forest(data, params, 5);
  write_forest_model(dir.file("model.json"), model, make_provenance("train", 5));
  const ForestModel loaded = read_forest_model(dir.file("model.json"));
  CHECK(loaded == model);

  const auto probes = fixture_features(50, 77);
  for (const auto& probe : probes) {
    CHECK(predict(model, probe.features) == predict(loaded, probe.features));
  }
}

TEST_CASE("truncated model file fails without returning a partial model") {
  TempDir dir("model_truncated");
  const auto data = fixture_features(30, 2);
  ForestParams params;
  params.n_trees = 10;
  write_forest_model(dir.file("model.json"), train_forest(data, params, 5),
                     make_provenance("train", 5));
  std::string text = read_text(dir.file("model.json"));
  write_text(dir.file("cut.json"), text.substr(0, text.size() / 2));
  CHECK_THROWS_AS(read_forest_model(dir.file("cut.json")), FatalError);
}

TEST_CASE("score reports round-trip through jsonl") {
  TempDir dir("report_io");
  const auto corpus = synthesize_oer_corpus(OerSynthesisConfig{
      .with_control = 15, .without_control = 10, .seed = 4});
  const auto reports = score_corpus(corpus, builtin_profile_set());
  write_score_reports(dir.file("reports.jsonl"), reports);
  CHECK(read_score_reports(dir.file("reports.jsonl")) == reports);

  // csv flavor is write-only display output; just check shape
  write_score_reports(dir.file("reports.csv"), reports, ReportFormat::Csv);
  const std::string csv = read_text(dir.file("reports.csv"));
  CHECK(csv.find("url,avail_score,norm_score,rating_title") == 0);
}

TEST_CASE("feature tables and predictions round-trip") {
  TempDir dir("feature_io");
  const auto rows = fixture_features(25, 8);
  write_feature_table(dir.file("features.jsonl"), rows);
  CHECK(read_feature_table(dir.file("features.jsonl")) == rows);

  ForestParams params;
  params.n_trees = 7;
  const auto model = train_forest(rows, params, 3);
  const auto predictions = predict_all(model, rows);
  write_predictions(dir.file("predictions.jsonl"), predictions);
  CHECK(read_predictions(dir.file("predictions.jsonl")) == predictions);
}
