#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "metaqa/features.hpp"
#include "metaqa/forest.hpp"
#include "metaqa/profile.hpp"
#include "metaqa/record.hpp"
#include "metaqa/scoring.hpp"

namespace metaqa {

enum class CorpusSource { SkillsCommons, VideoPlatform, Generic };
enum class CorpusFormat { Csv, Jsonl };

std::string_view corpus_source_name(CorpusSource source);
std::string_view corpus_format_name(CorpusFormat format);

struct CorpusManifest {
  CorpusSource source = CorpusSource::Generic;
  std::size_t record_count = 0;
  std::vector<std::string> fields_present;  // schema fields observed non-absent
};

// Row accounting for a parse run. Structural failures (wrong column count,
// bad JSON, empty url) are "malformed" and skipped; records that parse but
// violate a value invariant (rating range, negative counts) are "rejected".
// accepted + malformed + rejected == total_rows always holds.
struct ParseStats {
  std::size_t total_rows = 0;
  std::size_t accepted = 0;
  std::size_t malformed = 0;
  std::size_t rejected = 0;
  std::size_t date_warnings = 0;
  std::vector<std::string> messages;  // capped; counts above stay exact

  void warn(std::string message);
};

struct OerParseResult {
  std::vector<OerRecord> records;
  CorpusManifest manifest;
  ParseStats stats;
};

struct VideoParseResult {
  std::vector<VideoRecord> records;
  CorpusManifest manifest;
  ParseStats stats;
};

// Raw-corpus ingestion. CSV needs the documented header contract
// (multi-valued columns use '|'); JSONL takes one object per line and also
// accepts the canonical records format. Unreadable files and a malformed-row
// share above 10% raise FatalError.
OerParseResult parse_oer_corpus(const std::filesystem::path& path, CorpusFormat format,
                                CorpusSource source = CorpusSource::Generic);
VideoParseResult parse_video_corpus(const std::filesystem::path& path, CorpusFormat format);

// Canonical records files ("metaqa-records/1"): a header object followed by
// one record object per line, absent fields omitted.
void write_oer_records(const std::filesystem::path& path, std::span<const OerRecord> records,
                       CorpusSource source = CorpusSource::Generic);
std::pair<std::vector<OerRecord>, CorpusManifest> read_oer_records(
    const std::filesystem::path& path);
void write_video_records(const std::filesystem::path& path,
                         std::span<const VideoRecord> records,
                         CorpusSource source = CorpusSource::VideoPlatform);
std::pair<std::vector<VideoRecord>, CorpusManifest> read_video_records(
    const std::filesystem::path& path);

// Effective run configuration recorded into every artifact. Deliberately
// carries no timestamps so identical runs write identical bytes.
struct Provenance {
  std::string tool_version;
  std::string command;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> inputs;  // (path, content hash)
  std::map<std::string, std::string> config;
};

Provenance make_provenance(std::string command, std::uint64_t seed);

// Artifact files. Writers emit a format-version field first; readers raise
// FatalError naming expected and found versions on mismatch, and never
// return a partial object.
void write_profile_set(const std::filesystem::path& path, const ProfileSet& set,
                       const Provenance& provenance);
ProfileSet read_profile_set(const std::filesystem::path& path);

void write_forest_model(const std::filesystem::path& path, const ForestModel& model,
                        const Provenance& provenance);
ForestModel read_forest_model(const std::filesystem::path& path);

enum class ReportFormat { Jsonl, Csv };

void write_score_reports(const std::filesystem::path& path,
                         std::span<const ScoreReport> reports,
                         ReportFormat format = ReportFormat::Jsonl);
std::vector<ScoreReport> read_score_reports(const std::filesystem::path& path);  // jsonl only

void write_feature_table(const std::filesystem::path& path,
                         std::span<const LabeledFeatures> rows);
std::vector<LabeledFeatures> read_feature_table(const std::filesystem::path& path);

void write_predictions(const std::filesystem::path& path, std::span<const Prediction> rows);
std::vector<Prediction> read_predictions(const std::filesystem::path& path);

// FNV-1a over the file bytes, rendered "fnv1a64:<hex>"; provenance only.
std::string file_content_hash(const std::filesystem::path& path);

// Shortest round-trip decimal rendering, for CSV output.
std::string format_double(double value);

}  // namespace metaqa
