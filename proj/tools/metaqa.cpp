// metaqa: batch CLI wiring the pipeline end to end. Subcommands are thin,
// deterministic wrappers over the core library; every artifact records the
// effective configuration and input hashes as provenance.
//
// Exit codes: 0 success, 1 fatal input/config error, 2 broken invariant.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "metaqa/errors.hpp"
#include "metaqa/explore.hpp"
#include "metaqa/io.hpp"
#include "metaqa/mapping.hpp"
#include "metaqa/profile.hpp"
#include "metaqa/scoring.hpp"
#include "metaqa/synthetic.hpp"
#include "metaqa/validate.hpp"
#include "metaqa/version.hpp"

namespace {

using namespace metaqa;

struct RunConfig {
  std::uint64_t seed = kDefaultSeed;
  bool verbose = false;

  // ingest
  std::string input;
  std::string format = "csv";
  std::string kind = "oer";
  std::string source = "generic";

  // shared paths
  std::string records;
  std::string profile_path;
  std::string model_path;
  std::string videos;
  std::string output;
  std::string output_dir;

  // profile
  bool builtin = false;

  // score
  std::string report_format = "jsonl";

  // train
  int trees = ForestParams{}.n_trees;
  int max_depth = 0;
  int min_leaf = 1;
  int mtry = 0;
  bool no_bootstrap = false;
  double train_fraction = 0.8;
  bool no_stratify = false;
  int threads = 1;

  // validate
  std::vector<std::string> level_keywords;
  std::string map_language;
  std::string map_accessibility;

  // explore
  bool svg = false;

  // synth
  int with_control = OerSynthesisConfig{}.with_control;
  int without_control = OerSynthesisConfig{}.without_control;
  int n_videos = VideoSynthesisConfig{}.videos;
};

void print_stats(const ParseStats& stats, bool verbose) {
  if (stats.malformed > 0 || stats.rejected > 0 || stats.date_warnings > 0) {
    std::cerr << "warnings: " << stats.malformed << " malformed, " << stats.rejected
              << " rejected, " << stats.date_warnings << " bad dates\n";
  }
  if (verbose) {
    for (const auto& message : stats.messages) std::cerr << "  " << message << '\n';
  }
}

CorpusFormat parse_format(const std::string& name) {
  return name == "jsonl" ? CorpusFormat::Jsonl : CorpusFormat::Csv;
}

CorpusSource parse_source(const std::string& name) {
  if (name == "skillscommons") return CorpusSource::SkillsCommons;
  if (name == "video") return CorpusSource::VideoPlatform;
  return CorpusSource::Generic;
}

Provenance provenance_for(const RunConfig& cfg, const std::string& command,
                          std::vector<std::string> inputs) {
  Provenance p = make_provenance(command, cfg.seed);
  for (auto& path : inputs) {
    p.inputs.emplace_back(path, file_content_hash(path));
  }
  return p;
}

int run_ingest(const RunConfig& cfg) {
  const CorpusFormat format = parse_format(cfg.format);
  if (cfg.kind == "video") {
    auto result = parse_video_corpus(cfg.input, format);
    print_stats(result.stats, cfg.verbose);
    write_video_records(cfg.output, result.records, result.manifest.source);
    std::cout << "ingested " << result.records.size() << " video records ("
              << result.stats.total_rows << " rows, " << result.stats.malformed
              << " malformed, " << result.stats.rejected << " rejected) -> " << cfg.output
              << '\n';
  } else {
    auto result = parse_oer_corpus(cfg.input, format, parse_source(cfg.source));
    print_stats(result.stats, cfg.verbose);
    write_oer_records(cfg.output, result.records, result.manifest.source);
    std::size_t with = 0, without = 0;
    for (const auto& r : result.records) {
      if (r.quality_control == QualityControl::WithControl) ++with;
      if (r.quality_control == QualityControl::WithoutControl) ++without;
    }
    std::cout << "ingested " << result.records.size() << " oer records (" << with
              << " with control, " << without << " without) -> " << cfg.output << '\n';
    std::cout << "fields present:";
    for (const auto& f : result.manifest.fields_present) std::cout << ' ' << f;
    std::cout << '\n';
  }
  return 0;
}

int run_profile(const RunConfig& cfg) {
  if (cfg.builtin) {
    write_profile_set(cfg.output, builtin_profile_set(),
                      provenance_for(cfg, "profile --builtin", {}));
    std::cout << "wrote builtin benchmark profile -> " << cfg.output << '\n';
    return 0;
  }
  const auto [records, manifest] = read_oer_records(cfg.records);
  const ProfileSet set = build_profile_set(records);
  Provenance p = provenance_for(cfg, "profile", {cfg.records});
  p.config["controlled_subset_size"] = std::to_string(set.controlled_subset_size);
  write_profile_set(cfg.output, set, p);
  std::cout << "profiled " << set.controlled_subset_size << " controlled of "
            << set.source_corpus_size << " records -> " << cfg.output << '\n';
  for (const auto& profile : set.profiles) {
    std::printf("  %-16s rate %.4f weight %.4f", std::string(field_name(profile.field)).c_str(),
                profile.importance_rate, profile.normalized_importance_rate);
    if (const auto* fit = std::get_if<NormalFit>(&profile.rating_fn)) {
      std::printf("  fit mean %.3f scale %.3f%s", fit->mean, fit->scale,
                  fit->degenerate ? " (degenerate)" : "");
    }
    std::printf("\n");
  }
  return 0;
}

int run_score(const RunConfig& cfg) {
  const auto [records, manifest] = read_oer_records(cfg.records);
  const ProfileSet profiles = read_profile_set(cfg.profile_path);
  const auto reports = score_corpus(records, profiles);
  write_score_reports(cfg.output, reports,
                      cfg.report_format == "csv" ? ReportFormat::Csv : ReportFormat::Jsonl);
  std::cout << "scored " << reports.size() << " records -> " << cfg.output << '\n';
  return 0;
}

int run_train(const RunConfig& cfg) {
  const auto [records, manifest] = read_oer_records(cfg.records);
  const ProfileSet profiles = read_profile_set(cfg.profile_path);

  std::size_t unknown = 0;
  for (const auto& r : records) {
    if (r.quality_control == QualityControl::Unknown) ++unknown;
  }
  if (unknown > 0) {
    throw FatalError("training corpus holds " + std::to_string(unknown) +
                     " records without a quality-control label");
  }

  const auto table = extract_feature_table(records, profiles);
  SplitSpec split_spec;
  split_spec.train_fraction = cfg.train_fraction;
  split_spec.stratified = !cfg.no_stratify;
  split_spec.seed = cfg.seed;
  const auto [train, test] = split_train_test(table, split_spec);

  ForestParams params;
  params.n_trees = cfg.trees;
  params.max_depth = cfg.max_depth;
  params.min_samples_leaf = cfg.min_leaf;
  params.n_candidate_features = cfg.mtry;
  params.bootstrap = !cfg.no_bootstrap;
  params.n_threads = cfg.threads;

  ForestModel model = train_forest(train, params, cfg.seed);
  model.training_corpus_hash = file_content_hash(cfg.records);
  const Metrics metrics = evaluate(model, test);

  Provenance p = provenance_for(cfg, "train", {cfg.records, cfg.profile_path});
  p.config["train_fraction"] = format_double(cfg.train_fraction);
  p.config["stratified"] = split_spec.stratified ? "true" : "false";
  p.config["train_size"] = std::to_string(train.size());
  p.config["test_size"] = std::to_string(test.size());
  p.config["accuracy"] = format_double(metrics.accuracy);
  p.config["f1_with_control"] = format_double(metrics.f1_with_control);
  p.config["f1_without_control"] = format_double(metrics.f1_without_control);
  write_forest_model(cfg.output, model, p);

  std::cout << "trained " << params.n_trees << " trees on " << train.size()
            << " records (seed " << cfg.seed << ") -> " << cfg.output << '\n';
  std::printf("test accuracy %.4f  f1 with-control %.4f  f1 without-control %.4f\n",
              metrics.accuracy, metrics.f1_with_control, metrics.f1_without_control);
  std::printf("confusion [actual x predicted]: [[%lld, %lld], [%lld, %lld]]\n",
              static_cast<long long>(metrics.confusion[0][0]),
              static_cast<long long>(metrics.confusion[0][1]),
              static_cast<long long>(metrics.confusion[1][0]),
              static_cast<long long>(metrics.confusion[1][1]));
  std::cout << "feature importances:\n";
  const auto& names = feature_names();
  for (int i = 0; i < kFeatureCount; ++i) {
    std::printf("  %-24s %.4f\n", names[i].c_str(), model.importances[i]);
  }
  return 0;
}

int run_predict(const RunConfig& cfg) {
  const auto [records, manifest] = read_oer_records(cfg.records);
  const ProfileSet profiles = read_profile_set(cfg.profile_path);
  const ForestModel model = read_forest_model(cfg.model_path);
  const auto table = extract_feature_table(records, profiles);
  const auto predictions = predict_all(model, table);
  write_predictions(cfg.output, predictions);
  std::size_t with = 0;
  for (const auto& p : predictions) {
    if (p.label == QualityControl::WithControl) ++with;
  }
  std::cout << "predicted " << predictions.size() << " records (" << with
            << " with control, " << predictions.size() - with << " without) -> "
            << cfg.output << '\n';
  return 0;
}

int run_validate(const RunConfig& cfg) {
  const auto [videos, manifest] = read_video_records(cfg.videos);
  const ForestModel model = read_forest_model(cfg.model_path);
  const ProfileSet profiles = read_profile_set(cfg.profile_path);

  MappingRules rules;
  if (!cfg.level_keywords.empty()) rules.level_keywords = cfg.level_keywords;
  if (!cfg.map_language.empty()) rules.default_language = cfg.map_language;
  if (!cfg.map_accessibility.empty()) rules.default_accessibility = cfg.map_accessibility;

  const auto report = validate_by_subject(videos, model, profiles, rules);
  write_validation_csv(report, cfg.output);

  const auto& s = report.summary;
  std::cout << "validated " << videos.size() << " videos over " << s.subjects
            << " subjects -> " << cfg.output << '\n';
  std::cout << "predicted groups: " << s.predicted_with << " with control, "
            << s.predicted_without << " without\n";
  if (s.has_average) {
    std::printf("average rating difference %+.4f (positive in %lld of %lld tallied subjects)\n",
                s.average_difference, static_cast<long long>(s.positive),
                static_cast<long long>(s.positive + s.negative + s.zero));
  } else {
    std::cout << "no subject had both predicted groups non-empty\n";
  }
  if (s.skipped > 0) {
    std::cout << s.skipped << " subjects skipped (one predicted group empty)\n";
  }
  std::printf("rating standard deviation %.4f\n", rating_std(videos));
  return 0;
}

int run_explore(const RunConfig& cfg) {
  const auto [records, manifest] = read_oer_records(cfg.records);
  const ExploreReport report = explore_corpus(records);
  write_explore_csv(report, cfg.output_dir);
  if (cfg.svg) write_explore_svg(report, cfg.output_dir);
  std::cout << "explored " << report.corpus_size << " records (" << report.with_control
            << " with control, " << report.without_control << " without) -> "
            << cfg.output_dir << '\n';
  if (!report.yearly.points.empty()) {
    std::printf("control share %.4f (%d) -> %.4f (%d)\n",
                report.yearly.points.front().proportion, report.yearly.points.front().year,
                report.yearly.points.back().proportion, report.yearly.points.back().year);
  }
  return 0;
}

int run_synth(const RunConfig& cfg) {
  if (cfg.kind == "video") {
    VideoSynthesisConfig config;
    config.videos = cfg.n_videos;
    config.seed = cfg.seed;
    const auto videos = synthesize_video_corpus(config);
    write_video_records(cfg.output, videos);
    std::cout << "synthesized " << videos.size() << " video records -> " << cfg.output
              << '\n';
  } else {
    OerSynthesisConfig config;
    config.with_control = cfg.with_control;
    config.without_control = cfg.without_control;
    config.seed = cfg.seed;
    const auto corpus = synthesize_oer_corpus(config);
    write_oer_records(cfg.output, corpus);
    std::cout << "synthesized " << corpus.size() << " oer records -> " << cfg.output << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  CLI::App app{"metadata quality toolkit for open educational resources"};
  app.set_version_flag("--version", std::string("metaqa ") + kToolVersion + " (formats " +
                                        kRecordsFormat + ", " + kProfileFormat + ", " +
                                        kModelFormat + ", " + kReportFormat + ")");
  app.add_option("--seed", cfg.seed, "seed for every random draw")->capture_default_str();
  app.add_flag("--verbose", cfg.verbose, "print per-row parse warnings");
  app.require_subcommand(1);

  auto* ingest = app.add_subcommand("ingest", "parse a raw corpus into canonical records");
  ingest->add_option("--input", cfg.input, "raw corpus file")->required();
  ingest->add_option("--format", cfg.format, "input format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  ingest->add_option("--kind", cfg.kind, "record kind")
      ->check(CLI::IsMember({"oer", "video"}))
      ->capture_default_str();
  ingest->add_option("--source", cfg.source, "corpus source tag")
      ->check(CLI::IsMember({"skillscommons", "video", "generic"}))
      ->capture_default_str();
  ingest->add_option("--output", cfg.output, "canonical records file")->required();

  auto* profile = app.add_subcommand("profile", "derive field benchmarks from records");
  profile->add_option("--records", cfg.records, "canonical oer records");
  profile->add_flag("--builtin", cfg.builtin, "write the shipped benchmark constants");
  profile->add_option("--output", cfg.output, "profile file")->required();

  auto* score = app.add_subcommand("score", "score records against a profile");
  score->add_option("--records", cfg.records, "canonical oer records")->required();
  score->add_option("--profile", cfg.profile_path, "profile file")->required();
  score->add_option("--format", cfg.report_format, "report format")
      ->check(CLI::IsMember({"jsonl", "csv"}))
      ->capture_default_str();
  score->add_option("--output", cfg.output, "score report file")->required();

  auto* train = app.add_subcommand("train", "train the quality classifier");
  train->add_option("--records", cfg.records, "canonical labeled oer records")->required();
  train->add_option("--profile", cfg.profile_path, "profile file")->required();
  train->add_option("--output", cfg.output, "model file")->required();
  train->add_option("--trees", cfg.trees, "number of trees")->capture_default_str();
  train->add_option("--max-depth", cfg.max_depth, "depth cap, 0 = unlimited")
      ->capture_default_str();
  train->add_option("--min-leaf", cfg.min_leaf, "min samples per leaf")->capture_default_str();
  train->add_option("--mtry", cfg.mtry, "candidate features per node, 0 = ceil(sqrt(d))")
      ->capture_default_str();
  train->add_flag("--no-bootstrap", cfg.no_bootstrap, "grow every tree on the full sample");
  train->add_option("--train-fraction", cfg.train_fraction, "train split share")
      ->capture_default_str();
  train->add_flag("--no-stratify", cfg.no_stratify, "split without class stratification");
  train->add_option("--threads", cfg.threads, "worker cap for tree growing")
      ->capture_default_str();

  auto* predict_cmd = app.add_subcommand("predict", "classify records with a trained model");
  predict_cmd->add_option("--model", cfg.model_path, "model file")->required();
  predict_cmd->add_option("--records", cfg.records, "canonical oer records")->required();
  predict_cmd->add_option("--profile", cfg.profile_path, "profile file")->required();
  predict_cmd->add_option("--output", cfg.output, "predictions file")->required();

  auto* validate = app.add_subcommand("validate", "compare predicted groups by user rating");
  validate->add_option("--videos", cfg.videos, "canonical video records")->required();
  validate->add_option("--model", cfg.model_path, "model file")->required();
  validate->add_option("--profile", cfg.profile_path, "profile file")->required();
  validate->add_option("--output", cfg.output, "validation table (csv)")->required();
  validate->add_option("--level-keyword", cfg.level_keywords,
                       "override the level keyword list (repeatable)");
  validate->add_option("--map-language", cfg.map_language,
                       "mark mapped videos as carrying this language");
  validate->add_option("--map-accessibility", cfg.map_accessibility,
                       "mark mapped videos as carrying this accessibility");

  auto* explore = app.add_subcommand("explore", "corpus exploration reports");
  explore->add_option("--records", cfg.records, "canonical oer records")->required();
  explore->add_option("--output-dir", cfg.output_dir, "report directory")->required();
  explore->add_flag("--svg", cfg.svg, "also render histogram svg files");

  auto* synth = app.add_subcommand("synth", "generate a reference corpus");
  synth->add_option("--kind", cfg.kind, "record kind")
      ->check(CLI::IsMember({"oer", "video"}))
      ->capture_default_str();
  synth->add_option("--output", cfg.output, "canonical records file")->required();
  synth->add_option("--with-control", cfg.with_control, "controlled record count")
      ->capture_default_str();
  synth->add_option("--without-control", cfg.without_control, "uncontrolled record count")
      ->capture_default_str();
  synth->add_option("--videos", cfg.n_videos, "video count")->capture_default_str();

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(ingest)) return run_ingest(cfg);
    if (app.got_subcommand(profile)) {
      if (cfg.builtin == !cfg.records.empty()) {
        throw FatalError("profile needs exactly one of --records or --builtin");
      }
      return run_profile(cfg);
    }
    if (app.got_subcommand(score)) return run_score(cfg);
    if (app.got_subcommand(train)) return run_train(cfg);
    if (app.got_subcommand(predict_cmd)) return run_predict(cfg);
    if (app.got_subcommand(validate)) return run_validate(cfg);
    if (app.got_subcommand(explore)) return run_explore(cfg);
    if (app.got_subcommand(synth)) return run_synth(cfg);
  } catch (const FatalError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const InvariantError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
