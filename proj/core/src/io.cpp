#include "metaqa/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "metaqa/csv.hpp"
#include "metaqa/errors.hpp"
#include "metaqa/version.hpp"

namespace metaqa {

using nlohmann::json;

namespace {

constexpr std::size_t kMaxParseMessages = 50;

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FatalError("cannot open " + path.string() + " for reading");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FatalError("cannot open " + path.string() + " for writing");
  return out;
}

json parse_json_text(const std::string& text, const std::filesystem::path& path,
                     const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    throw FatalError(path.string() + ": cannot parse " + what + " as JSON");
  }
  return j;
}

void check_format(const json& j, const char* expected, const std::filesystem::path& path) {
  const std::string found =
      j.is_object() && j.contains("format") && j.at("format").is_string()
          ? j.at("format").get<std::string>()
          : "(missing)";
  if (found != expected) {
    throw FatalError(path.string() + ": format version mismatch: expected \"" +
                     expected + "\", found \"" + found + "\"");
  }
}

bool parse_int64(std::string_view text, std::int64_t& out) {
  const std::string t = trim(text);
  if (t.empty()) {
    out = 0;
    return true;
  }
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

bool parse_real(std::string_view text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) {
    out = 0.0;
    return true;
  }
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc() && ptr == t.data() + t.size();
}

std::vector<std::string> split_multi_value(std::string_view cell) {
  std::vector<std::string> values;
  std::size_t start = 0;
  while (start <= cell.size()) {
    const std::size_t bar = cell.find('|', start);
    const std::string_view piece =
        cell.substr(start, bar == std::string_view::npos ? cell.size() - start : bar - start);
    const std::string t = trim(piece);
    if (!t.empty()) values.push_back(t);
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return values;
}

// -- OER record <-> JSON ----------------------------------------------------

void set_optional_string(json& j, const char* key, const std::optional<std::string>& value) {
  if (value) j[key] = *value;
}

void set_optional_date(json& j, const char* key, const std::optional<Date>& value) {
  if (value) j[key] = format_date(*value);
}

void set_list(json& j, const char* key, const std::vector<std::string>& values) {
  if (!values.empty()) j[key] = values;
}

json oer_to_json(const OerRecord& r) {
  json j = json::object();
  j["url"] = r.url;
  set_optional_string(j, "title", r.title);
  set_optional_string(j, "description", r.description);
  set_optional_string(j, "educational_type", r.educational_type);
  set_optional_date(j, "date_available", r.date_available);
  set_optional_date(j, "date_issued", r.date_issued);
  set_list(j, "subjects", r.subjects);
  set_optional_string(j, "level", r.level);
  set_optional_string(j, "time_required", r.time_required);
  set_list(j, "accessibilities", r.accessibilities);
  set_list(j, "languages", r.languages);
  if (r.quality_control != QualityControl::Unknown) {
    j["quality_control"] = std::string(quality_control_name(r.quality_control));
  }
  return j;
}

std::optional<std::string> get_optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<std::string>();
}

std::vector<std::string> get_list(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return {};
  return j.at(key).get<std::vector<std::string>>();
}

std::optional<Date> get_optional_date(const json& j, const char* key, ParseStats& stats) {
  const auto text = get_optional_string(j, key);
  if (!text) return std::nullopt;
  const auto date = parse_date(*text);
  if (!date && !is_blank(*text)) {
    ++stats.date_warnings;
    stats.warn("unparseable date \"" + *text + "\" treated as absent");
  }
  return date;
}

OerRecord oer_from_json(const json& j, ParseStats& stats) {
  OerRecord r;
  r.url = j.at("url").get<std::string>();
  r.title = get_optional_string(j, "title");
  r.description = get_optional_string(j, "description");
  r.educational_type = get_optional_string(j, "educational_type");
  r.date_available = get_optional_date(j, "date_available", stats);
  r.date_issued = get_optional_date(j, "date_issued", stats);
  r.subjects = get_list(j, "subjects");
  r.level = get_optional_string(j, "level");
  r.time_required = get_optional_string(j, "time_required");
  r.accessibilities = get_list(j, "accessibilities");
  r.languages = get_list(j, "languages");
  if (const auto qc = get_optional_string(j, "quality_control")) {
    r.quality_control = parse_quality_control_value(*qc);
  }
  return canonicalized(std::move(r));
}

// -- video record <-> JSON --------------------------------------------------

json video_to_json(const VideoRecord& v) {
  json j = json::object();
  j["url"] = v.url;
  j["title"] = v.title;
  set_optional_string(j, "description", v.description);
  j["dislikes"] = v.dislikes;
  j["length_seconds"] = v.length_seconds;
  j["likes"] = v.likes;
  j["rating"] = v.rating;
  set_list(j, "subjects", v.subjects);
  j["views"] = v.views;
  return j;
}

VideoRecord video_from_json(const json& j) {
  VideoRecord v;
  v.url = j.at("url").get<std::string>();
  v.title = j.value("title", std::string());
  v.description = get_optional_string(j, "description");
  v.dislikes = j.value("dislikes", std::int64_t{0});
  v.length_seconds = j.value("length_seconds", std::int64_t{0});
  v.likes = j.value("likes", std::int64_t{0});
  v.rating = j.value("rating", 0.0);
  v.subjects = get_list(j, "subjects");
  v.views = j.value("views", std::int64_t{0});
  return canonicalized(std::move(v));
}

// Value-invariant check shared by the CSV and JSONL paths. Returns the
// reason a record must be rejected, or nullptr when it is acceptable.
const char* video_rejection_reason(const VideoRecord& v) {
  if (!(v.rating >= 0.0 && v.rating <= 5.0)) return "rating outside [0, 5]";
  if (v.likes < 0 || v.dislikes < 0 || v.views < 0) return "negative count";
  if (v.length_seconds < 0) return "negative length";
  return nullptr;
}

// -- manifest helpers --------------------------------------------------------

std::vector<std::string> oer_fields_present(std::span<const OerRecord> records) {
  bool seen[10] = {};
  for (const auto& r : records) {
    for (Field f : kAllFields) {
      if (field_available(r, f)) seen[field_index(f)] = true;
    }
    if (r.educational_type) seen[7] = true;
    if (r.date_available) seen[8] = true;
    if (r.date_issued) seen[9] = true;
  }
  std::vector<std::string> out;
  for (Field f : kAllFields) {
    if (seen[field_index(f)]) out.emplace_back(field_name(f));
  }
  if (seen[7]) out.emplace_back("educational_type");
  if (seen[8]) out.emplace_back("date_available");
  if (seen[9]) out.emplace_back("date_issued");
  return out;
}

std::vector<std::string> video_fields_present(std::span<const VideoRecord> records) {
  std::vector<std::string> out = {"url", "title", "dislikes", "length_seconds",
                                  "likes", "rating", "views"};
  bool any_description = false, any_subjects = false;
  for (const auto& r : records) {
    any_description = any_description || r.description.has_value();
    any_subjects = any_subjects || !r.subjects.empty();
  }
  if (any_description) out.insert(out.begin() + 2, "description");
  if (any_subjects) out.emplace_back("subjects");
  return out;
}

// -- header map for CSV ------------------------------------------------------

std::map<std::string, std::size_t> header_columns(const std::vector<std::string>& header) {
  std::map<std::string, std::size_t> columns;
  for (std::size_t i = 0; i < header.size(); ++i) {
    std::string name = trim(header[i]);
    for (auto& c : name) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    columns.emplace(std::move(name), i);
  }
  return columns;
}

std::string_view cell(const std::vector<std::string>& row,
                      const std::map<std::string, std::size_t>& columns, const char* name) {
  const auto it = columns.find(name);
  if (it == columns.end()) return {};
  return row[it->second];
}

void enforce_malformed_share(const ParseStats& stats, const std::filesystem::path& path) {
  if (stats.total_rows > 0 &&
      static_cast<double>(stats.malformed) > 0.10 * static_cast<double>(stats.total_rows)) {
    throw FatalError(path.string() + ": " + std::to_string(stats.malformed) + " of " +
                     std::to_string(stats.total_rows) +
                     " rows malformed (over the 10% corpus limit)");
  }
}

}  // namespace

void ParseStats::warn(std::string message) {
  if (messages.size() < kMaxParseMessages) {
    messages.push_back(std::move(message));
  } else if (messages.size() == kMaxParseMessages) {
    messages.push_back("(further warnings suppressed)");
  }
}

std::string_view corpus_source_name(CorpusSource source) {
  switch (source) {
    case CorpusSource::SkillsCommons: return "skillscommons";
    case CorpusSource::VideoPlatform: return "video_platform";
    case CorpusSource::Generic: return "generic";
  }
  return "generic";
}

std::string_view corpus_format_name(CorpusFormat format) {
  return format == CorpusFormat::Csv ? "csv" : "jsonl";
}

// -- raw corpus ingestion -----------------------------------------------------

OerParseResult parse_oer_corpus(const std::filesystem::path& path, CorpusFormat format,
                                CorpusSource source) {
  auto in = open_input(path);
  OerParseResult result;
  result.manifest.source = source;

  if (format == CorpusFormat::Csv) {
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next_row(row)) {
      return result;  // empty file: zero records, empty manifest
    }
    const auto columns = header_columns(row);
    if (!columns.contains("url")) {
      throw FatalError(path.string() + ": header misses the required \"url\" column");
    }
    while (reader.next_row(row)) {
      ++result.stats.total_rows;
      if (row.size() != columns.size()) {
        ++result.stats.malformed;
        result.stats.warn("row " + std::to_string(result.stats.total_rows) + ": expected " +
                          std::to_string(columns.size()) + " columns, got " +
                          std::to_string(row.size()));
        continue;
      }
      OerRecord r;
      r.url = trim(cell(row, columns, "url"));
      if (r.url.empty()) {
        ++result.stats.malformed;
        result.stats.warn("row " + std::to_string(result.stats.total_rows) + ": empty url");
        continue;
      }
      const auto scalar = [&](const char* name) -> std::optional<std::string> {
        const std::string t = trim(cell(row, columns, name));
        if (t.empty()) return std::nullopt;
        return t;
      };
      r.title = scalar("title");
      r.description = scalar("description");
      r.educational_type = scalar("educational_type");
      const auto date = [&](const char* name) -> std::optional<Date> {
        const auto text = scalar(name);
        if (!text) return std::nullopt;
        const auto d = parse_date(*text);
        if (!d) {
          ++result.stats.date_warnings;
          result.stats.warn("row " + std::to_string(result.stats.total_rows) +
                            ": unparseable date \"" + *text + "\" treated as absent");
        }
        return d;
      };
      r.date_available = date("date_available");
      r.date_issued = date("date_issued");
      r.subjects = split_multi_value(cell(row, columns, "subjects"));
      r.level = scalar("level");
      r.time_required = scalar("time_required");
      r.accessibilities = split_multi_value(cell(row, columns, "accessibilities"));
      r.languages = split_multi_value(cell(row, columns, "languages"));
      r.quality_control = parse_quality_control_value(cell(row, columns, "quality_control"));
      result.records.push_back(canonicalized(std::move(r)));
      ++result.stats.accepted;
    }
  } else {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (is_blank(line)) continue;
      json j = json::parse(line, nullptr, false);
      if (first && j.is_object() && j.contains("format")) {
        // canonical records file: validate the header instead of ingesting it
        check_format(j, kRecordsFormat, path);
        first = false;
        continue;
      }
      first = false;
      ++result.stats.total_rows;
      if (j.is_discarded() || !j.is_object() || !j.contains("url")) {
        ++result.stats.malformed;
        result.stats.warn("line " + std::to_string(result.stats.total_rows) +
                          ": not a record object");
        continue;
      }
      try {
        OerRecord r = oer_from_json(j, result.stats);
        if (r.url.empty()) throw FatalError("empty url");
        result.records.push_back(std::move(r));
        ++result.stats.accepted;
      } catch (const std::exception& e) {
        ++result.stats.malformed;
        result.stats.warn("line " + std::to_string(result.stats.total_rows) + ": " + e.what());
      }
    }
  }

  enforce_malformed_share(result.stats, path);
  result.manifest.record_count = result.records.size();
  result.manifest.fields_present = oer_fields_present(result.records);
  return result;
}

VideoParseResult parse_video_corpus(const std::filesystem::path& path, CorpusFormat format) {
  auto in = open_input(path);
  VideoParseResult result;
  result.manifest.source = CorpusSource::VideoPlatform;

  const auto consider = [&](VideoRecord v) {
    if (const char* reason = video_rejection_reason(v)) {
      ++result.stats.rejected;
      result.stats.warn("record \"" + v.url + "\" rejected: " + reason);
      return;
    }
    result.records.push_back(std::move(v));
    ++result.stats.accepted;
  };

  if (format == CorpusFormat::Csv) {
    CsvReader reader(in);
    std::vector<std::string> row;
    if (!reader.next_row(row)) return result;
    const auto columns = header_columns(row);
    if (!columns.contains("url")) {
      throw FatalError(path.string() + ": header misses the required \"url\" column");
    }
    while (reader.next_row(row)) {
      ++result.stats.total_rows;
      if (row.size() != columns.size()) {
        ++result.stats.malformed;
        result.stats.warn("row " + std::to_string(result.stats.total_rows) + ": expected " +
                          std::to_string(columns.size()) + " columns, got " +
                          std::to_string(row.size()));
        continue;
      }
      VideoRecord v;
      v.url = trim(cell(row, columns, "url"));
      v.title = trim(cell(row, columns, "title"));
      const std::string desc = trim(cell(row, columns, "description"));
      if (!desc.empty()) v.description = desc;
      v.subjects = split_multi_value(cell(row, columns, "subjects"));
      bool numbers_ok = parse_int64(cell(row, columns, "dislikes"), v.dislikes) &&
                        parse_int64(cell(row, columns, "length_seconds"), v.length_seconds) &&
                        parse_int64(cell(row, columns, "likes"), v.likes) &&
                        parse_int64(cell(row, columns, "views"), v.views) &&
                        parse_real(cell(row, columns, "rating"), v.rating);
      if (v.url.empty() || !numbers_ok) {
        ++result.stats.malformed;
        result.stats.warn("row " + std::to_string(result.stats.total_rows) +
                          (v.url.empty() ? ": empty url" : ": unparseable number"));
        continue;
      }
      consider(canonicalized(std::move(v)));
    }
  } else {
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (is_blank(line)) continue;
      json j = json::parse(line, nullptr, false);
      if (first && j.is_object() && j.contains("format")) {
        check_format(j, kRecordsFormat, path);
        first = false;
        continue;
      }
      first = false;
      ++result.stats.total_rows;
      if (j.is_discarded() || !j.is_object() || !j.contains("url")) {
        ++result.stats.malformed;
        result.stats.warn("line " + std::to_string(result.stats.total_rows) +
                          ": not a record object");
        continue;
      }
      try {
        VideoRecord v = video_from_json(j);
        if (v.url.empty()) throw FatalError("empty url");
        consider(std::move(v));
      } catch (const std::exception& e) {
        ++result.stats.malformed;
        result.stats.warn("line " + std::to_string(result.stats.total_rows) + ": " + e.what());
      }
    }
  }

  enforce_malformed_share(result.stats, path);
  result.manifest.record_count = result.records.size();
  result.manifest.fields_present = video_fields_present(result.records);
  return result;
}

// -- canonical records files --------------------------------------------------

namespace {

json records_header(const char* kind, std::size_t count, CorpusSource source,
                    std::vector<std::string> fields_present) {
  json header = json::object();
  header["format"] = kRecordsFormat;
  header["kind"] = kind;
  header["source"] = std::string(corpus_source_name(source));
  header["count"] = count;
  header["fields_present"] = std::move(fields_present);
  return header;
}

json read_records_header(std::istream& in, const char* kind,
                         const std::filesystem::path& path) {
  std::string line;
  if (!std::getline(in, line)) {
    throw FatalError(path.string() + ": empty records file (missing header)");
  }
  json header = parse_json_text(line, path, "records header");
  check_format(header, kRecordsFormat, path);
  const std::string found_kind = header.value("kind", "(missing)");
  if (found_kind != kind) {
    throw FatalError(path.string() + ": expected \"" + kind + "\" records, found \"" +
                     found_kind + "\"");
  }
  return header;
}

CorpusSource source_from_name(const std::string& name) {
  if (name == "skillscommons") return CorpusSource::SkillsCommons;
  if (name == "video_platform") return CorpusSource::VideoPlatform;
  return CorpusSource::Generic;
}

}  // namespace

void write_oer_records(const std::filesystem::path& path, std::span<const OerRecord> records,
                       CorpusSource source) {
  auto out = open_output(path);
  out << records_header("oer", records.size(), source, oer_fields_present(records)).dump()
      << '\n';
  for (const auto& r : records) out << oer_to_json(r).dump() << '\n';
}

std::pair<std::vector<OerRecord>, CorpusManifest> read_oer_records(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  const json header = read_records_header(in, "oer", path);
  const auto expected = header.value("count", std::size_t{0});

  std::vector<OerRecord> records;
  records.reserve(expected);
  ParseStats stats;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      records.push_back(oer_from_json(parse_json_text(line, path, "record"), stats));
    } catch (const FatalError&) {
      throw;
    } catch (const std::exception& e) {
      throw FatalError(path.string() + ":" + std::to_string(line_no) + ": bad record: " +
                       e.what());
    }
  }
  if (records.size() != expected) {
    throw FatalError(path.string() + ": header announces " + std::to_string(expected) +
                     " records but the file holds " + std::to_string(records.size()) +
                     " (truncated or corrupted)");
  }
  CorpusManifest manifest;
  manifest.source = source_from_name(header.value("source", "generic"));
  manifest.record_count = records.size();
  manifest.fields_present = header.value("fields_present", std::vector<std::string>{});
  return {std::move(records), std::move(manifest)};
}

void write_video_records(const std::filesystem::path& path,
                         std::span<const VideoRecord> records, CorpusSource source) {
  auto out = open_output(path);
  out << records_header("video", records.size(), source, video_fields_present(records)).dump()
      << '\n';
  for (const auto& r : records) out << video_to_json(r).dump() << '\n';
}

std::pair<std::vector<VideoRecord>, CorpusManifest> read_video_records(
    const std::filesystem::path& path) {
  auto in = open_input(path);
  const json header = read_records_header(in, "video", path);
  const auto expected = header.value("count", std::size_t{0});

  std::vector<VideoRecord> records;
  records.reserve(expected);
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      records.push_back(video_from_json(parse_json_text(line, path, "record")));
    } catch (const FatalError&) {
      throw;
    } catch (const std::exception& e) {
      throw FatalError(path.string() + ":" + std::to_string(line_no) + ": bad record: " +
                       e.what());
    }
  }
  if (records.size() != expected) {
    throw FatalError(path.string() + ": header announces " + std::to_string(expected) +
                     " records but the file holds " + std::to_string(records.size()) +
                     " (truncated or corrupted)");
  }
  CorpusManifest manifest;
  manifest.source = source_from_name(header.value("source", "video_platform"));
  manifest.record_count = records.size();
  manifest.fields_present = header.value("fields_present", std::vector<std::string>{});
  return {std::move(records), std::move(manifest)};
}

// -- provenance ----------------------------------------------------------------

Provenance make_provenance(std::string command, std::uint64_t seed) {
  Provenance p;
  p.tool_version = kToolVersion;
  p.command = std::move(command);
  p.seed = seed;
  return p;
}

namespace {

json provenance_json(const Provenance& p) {
  json inputs = json::array();
  for (const auto& [path, hash] : p.inputs) {
    inputs.push_back(json{{"hash", hash}, {"path", path}});
  }
  json config = json::object();
  for (const auto& [key, value] : p.config) config[key] = value;
  return json{{"command", p.command},
              {"config", config},
              {"inputs", inputs},
              {"seed", p.seed},
              {"tool_version", p.tool_version}};
}

}  // namespace

// -- profile file ----------------------------------------------------------------

void write_profile_set(const std::filesystem::path& path, const ProfileSet& set,
                       const Provenance& provenance) {
  json profiles = json::array();
  for (const auto& p : set.profiles) {
    json entry = json::object();
    entry["field"] = std::string(field_name(p.field));
    entry["importance_rate"] = p.importance_rate;
    entry["normalized_importance_rate"] = p.normalized_importance_rate;
    if (const auto* fit = std::get_if<NormalFit>(&p.rating_fn)) {
      entry["rating_fn"] = json{{"degenerate", fit->degenerate},
                                {"kind", "normal_fit"},
                                {"mean", fit->mean},
                                {"scale", fit->scale}};
    } else {
      entry["rating_fn"] = json{{"kind", "boolean"}};
    }
    profiles.push_back(std::move(entry));
  }
  json doc;
  doc["format"] = kProfileFormat;
  doc["source_corpus_size"] = set.source_corpus_size;
  doc["controlled_subset_size"] = set.controlled_subset_size;
  doc["profiles"] = std::move(profiles);
  doc["provenance"] = provenance_json(provenance);
  open_output(path) << doc.dump(2) << '\n';
}

ProfileSet read_profile_set(const std::filesystem::path& path) {
  std::stringstream buffer;
  buffer << open_input(path).rdbuf();
  const json doc = parse_json_text(buffer.str(), path, "profile file");
  check_format(doc, kProfileFormat, path);

  ProfileSet set;
  set.source_corpus_size = doc.value("source_corpus_size", std::size_t{0});
  set.controlled_subset_size = doc.value("controlled_subset_size", std::size_t{0});
  if (!doc.contains("profiles") || !doc.at("profiles").is_array() ||
      doc.at("profiles").size() != static_cast<std::size_t>(kFieldCount)) {
    throw FatalError(path.string() + ": profile file must hold exactly 7 field profiles");
  }
  bool seen[kFieldCount] = {};
  for (const auto& entry : doc.at("profiles")) {
    const std::string name = entry.value("field", "");
    const auto field = field_from_name(name);
    if (!field) throw FatalError(path.string() + ": unknown field \"" + name + "\"");
    if (seen[field_index(*field)]) {
      throw FatalError(path.string() + ": duplicate profile for field \"" + name + "\"");
    }
    seen[field_index(*field)] = true;
    FieldProfile& p = set.profiles[static_cast<std::size_t>(field_index(*field))];
    p.field = *field;
    p.importance_rate = entry.value("importance_rate", -1.0);
    p.normalized_importance_rate = entry.value("normalized_importance_rate", -1.0);
    const json& fn = entry.at("rating_fn");
    const std::string kind = fn.value("kind", "");
    if (kind == "normal_fit") {
      p.rating_fn = NormalFit{fn.value("mean", 0.0), fn.value("scale", -1.0),
                              fn.value("degenerate", false)};
    } else if (kind == "boolean") {
      p.rating_fn = BooleanRating{};
    } else {
      throw FatalError(path.string() + ": unknown rating_fn kind \"" + kind + "\"");
    }
  }
  validate_profile_set(set, kLoadedProfileSumTolerance);
  return set;
}

// -- model file --------------------------------------------------------------------

namespace {

json tree_to_json(const Tree& tree) {
  json nodes = json::array();
  for (const auto& node : tree) {
    if (node.feature < 0) {
      nodes.push_back(json::array({-1, node.counts[0], node.counts[1]}));
    } else {
      nodes.push_back(json::array({node.feature, node.threshold, node.left, node.right}));
    }
  }
  return nodes;
}

Tree tree_from_json(const json& nodes, const std::filesystem::path& path, int n_features) {
  Tree tree;
  tree.reserve(nodes.size());
  for (const auto& entry : nodes) {
    if (!entry.is_array() || entry.empty()) {
      throw FatalError(path.string() + ": malformed tree node");
    }
    TreeNode node;
    const int feature = entry.at(0).get<int>();
    if (feature < 0) {
      if (entry.size() != 3) throw FatalError(path.string() + ": malformed leaf node");
      node.feature = -1;
      node.counts = {entry.at(1).get<std::int64_t>(), entry.at(2).get<std::int64_t>()};
      if (node.counts[0] < 0 || node.counts[1] < 0 || node.counts[0] + node.counts[1] <= 0) {
        throw FatalError(path.string() + ": leaf class counts must be non-negative with a " +
                         "positive total");
      }
    } else {
      if (entry.size() != 4) throw FatalError(path.string() + ": malformed split node");
      if (feature >= n_features) {
        throw FatalError(path.string() + ": split feature index " + std::to_string(feature) +
                         " out of range for " + std::to_string(n_features) + " features");
      }
      node.feature = feature;
      node.threshold = entry.at(1).get<double>();
      node.left = entry.at(2).get<std::int32_t>();
      node.right = entry.at(3).get<std::int32_t>();
      if (node.left < 0 || node.right < 0) {
        throw FatalError(path.string() + ": split node with missing child");
      }
    }
    tree.push_back(node);
  }
  for (const auto& node : tree) {
    if (node.feature >= 0 && (node.left >= static_cast<std::int32_t>(tree.size()) ||
                              node.right >= static_cast<std::int32_t>(tree.size()))) {
      throw FatalError(path.string() + ": tree child index out of range");
    }
  }
  return tree;
}

}  // namespace

void write_forest_model(const std::filesystem::path& path, const ForestModel& model,
                        const Provenance& provenance) {
  json trees = json::array();
  for (const auto& tree : model.trees) trees.push_back(tree_to_json(tree));

  json doc;
  doc["format"] = kModelFormat;
  doc["params"] = json{{"bootstrap", model.params.bootstrap},
                       {"max_depth", model.params.max_depth},
                       {"min_samples_leaf", model.params.min_samples_leaf},
                       {"n_candidate_features", model.params.n_candidate_features},
                       {"n_threads", model.params.n_threads},
                       {"n_trees", model.params.n_trees}};
  doc["seed"] = model.seed;
  doc["feature_names"] = model.feature_names;
  doc["importances"] = model.importances;
  doc["degenerate_importances"] = model.degenerate_importances;
  if (model.single_class) {
    doc["single_class"] = *model.single_class;
  }
  doc["training_corpus_hash"] = model.training_corpus_hash;
  doc["trees"] = std::move(trees);
  doc["provenance"] = provenance_json(provenance);
  open_output(path) << doc.dump() << '\n';
}

ForestModel read_forest_model(const std::filesystem::path& path) {
  std::stringstream buffer;
  buffer << open_input(path).rdbuf();
  const json doc = parse_json_text(buffer.str(), path, "model file");
  check_format(doc, kModelFormat, path);

  ForestModel model;
  const json& params = doc.at("params");
  model.params.bootstrap = params.value("bootstrap", true);
  model.params.max_depth = params.value("max_depth", 0);
  model.params.min_samples_leaf = params.value("min_samples_leaf", 1);
  model.params.n_candidate_features = params.value("n_candidate_features", 0);
  model.params.n_threads = params.value("n_threads", 1);
  model.params.n_trees = params.value("n_trees", 0);
  model.seed = doc.value("seed", std::uint64_t{0});
  model.feature_names = doc.value("feature_names", std::vector<std::string>{});
  model.importances = doc.value("importances", std::vector<double>{});
  model.degenerate_importances = doc.value("degenerate_importances", false);
  if (doc.contains("single_class") && !doc.at("single_class").is_null()) {
    model.single_class = doc.at("single_class").get<int>();
  }
  model.training_corpus_hash = doc.value("training_corpus_hash", std::string());

  if (model.feature_names.empty()) {
    throw FatalError(path.string() + ": model misses feature names");
  }
  if (model.importances.size() != model.feature_names.size()) {
    throw FatalError(path.string() + ": importances length does not match feature count");
  }
  if (!doc.contains("trees") || !doc.at("trees").is_array() || doc.at("trees").empty()) {
    throw FatalError(path.string() + ": model holds no trees");
  }
  for (const auto& tree : doc.at("trees")) {
    model.trees.push_back(tree_from_json(tree, path, model.n_features()));
  }
  if (static_cast<int>(model.trees.size()) != model.params.n_trees) {
    throw FatalError(path.string() + ": tree count differs from params.n_trees");
  }
  return model;
}

// -- score reports ---------------------------------------------------------------

void write_score_reports(const std::filesystem::path& path,
                         std::span<const ScoreReport> reports, ReportFormat format) {
  auto out = open_output(path);
  if (format == ReportFormat::Jsonl) {
    json header = json::object();
    header["format"] = kReportFormat;
    header["count"] = reports.size();
    out << header.dump() << '\n';
    for (const auto& r : reports) {
      json ratings = json::object();
      json available = json::object();
      for (Field f : kAllFields) {
        ratings[std::string(field_name(f))] = r.per_field_rating[field_index(f)];
        available[std::string(field_name(f))] = r.per_field_available[field_index(f)];
      }
      json row = json::object();
      row["url"] = r.url;
      row["avail_score"] = r.avail_score;
      row["norm_score"] = r.norm_score;
      row["ratings"] = std::move(ratings);
      row["available"] = std::move(available);
      out << row.dump() << '\n';
    }
    return;
  }

  out << "url,avail_score,norm_score";
  for (Field f : kAllFields) out << ",rating_" << field_name(f);
  for (Field f : kAllFields) out << ",available_" << field_name(f);
  out << '\n';
  for (const auto& r : reports) {
    out << csv_escape(r.url) << ',' << format_double(r.avail_score) << ','
        << format_double(r.norm_score);
    for (Field f : kAllFields) out << ',' << format_double(r.per_field_rating[field_index(f)]);
    for (Field f : kAllFields) out << ',' << (r.per_field_available[field_index(f)] ? 1 : 0);
    out << '\n';
  }
}

std::vector<ScoreReport> read_score_reports(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw FatalError(path.string() + ": empty report file (missing header)");
  }
  const json header = parse_json_text(line, path, "report header");
  check_format(header, kReportFormat, path);
  const auto expected = header.value("count", std::size_t{0});

  std::vector<ScoreReport> reports;
  reports.reserve(expected);
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const json j = parse_json_text(line, path, "report row");
    ScoreReport r;
    r.url = j.value("url", std::string());
    r.avail_score = j.value("avail_score", 0.0);
    r.norm_score = j.value("norm_score", 0.0);
    for (Field f : kAllFields) {
      const std::string name(field_name(f));
      r.per_field_rating[field_index(f)] = j.at("ratings").value(name, 0.0);
      r.per_field_available[field_index(f)] = j.at("available").value(name, false);
    }
    reports.push_back(std::move(r));
  }
  if (reports.size() != expected) {
    throw FatalError(path.string() + ": header announces " + std::to_string(expected) +
                     " reports but the file holds " + std::to_string(reports.size()));
  }
  return reports;
}

// -- feature tables ----------------------------------------------------------------

void write_feature_table(const std::filesystem::path& path,
                         std::span<const LabeledFeatures> rows) {
  auto out = open_output(path);
  json header = json::object();
  header["format"] = kFeaturesFormat;
  header["count"] = rows.size();
  header["feature_names"] = feature_names();
  out << header.dump() << '\n';
  for (const auto& row : rows) {
    json j = json::object();
    j["url"] = row.url;
    j["features"] = row.features;
    j["label"] = std::string(quality_control_name(row.label));
    out << j.dump() << '\n';
  }
}

std::vector<LabeledFeatures> read_feature_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw FatalError(path.string() + ": empty feature table (missing header)");
  }
  const json header = parse_json_text(line, path, "feature-table header");
  check_format(header, kFeaturesFormat, path);
  const auto names = header.value("feature_names", std::vector<std::string>{});
  const auto& expected_names = feature_names();
  if (!std::equal(names.begin(), names.end(), expected_names.begin(), expected_names.end())) {
    throw FatalError(path.string() + ": feature-name order differs from the fixed schema");
  }
  const auto expected = header.value("count", std::size_t{0});

  std::vector<LabeledFeatures> rows;
  rows.reserve(expected);
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const json j = parse_json_text(line, path, "feature row");
    LabeledFeatures row;
    row.url = j.value("url", std::string());
    const auto values = j.at("features").get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(kFeatureCount)) {
      throw FatalError(path.string() + ": feature row must hold exactly " +
                       std::to_string(kFeatureCount) + " values");
    }
    std::copy(values.begin(), values.end(), row.features.begin());
    const auto label = quality_control_from_name(j.value("label", ""));
    if (!label) throw FatalError(path.string() + ": unknown label in feature row");
    row.label = *label;
    rows.push_back(std::move(row));
  }
  if (rows.size() != expected) {
    throw FatalError(path.string() + ": header announces " + std::to_string(expected) +
                     " rows but the file holds " + std::to_string(rows.size()));
  }
  return rows;
}

// -- predictions --------------------------------------------------------------------

void write_predictions(const std::filesystem::path& path, std::span<const Prediction> rows) {
  auto out = open_output(path);
  json header = json::object();
  header["format"] = kPredictionsFormat;
  header["count"] = rows.size();
  out << header.dump() << '\n';
  for (const auto& row : rows) {
    json j = json::object();
    j["url"] = row.url;
    j["label"] = std::string(quality_control_name(row.label));
    j["confidence"] = row.confidence;
    out << j.dump() << '\n';
  }
}

std::vector<Prediction> read_predictions(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line)) {
    throw FatalError(path.string() + ": empty predictions file (missing header)");
  }
  const json header = parse_json_text(line, path, "predictions header");
  check_format(header, kPredictionsFormat, path);
  const auto expected = header.value("count", std::size_t{0});

  std::vector<Prediction> rows;
  rows.reserve(expected);
  while (std::getline(in, line)) {
    if (is_blank(line)) continue;
    const json j = parse_json_text(line, path, "prediction row");
    Prediction p;
    p.url = j.value("url", std::string());
    const auto label = quality_control_from_name(j.value("label", ""));
    if (!label) throw FatalError(path.string() + ": unknown label in prediction row");
    p.label = *label;
    p.confidence = j.value("confidence", 0.0);
    rows.push_back(std::move(p));
  }
  if (rows.size() != expected) {
    throw FatalError(path.string() + ": header announces " + std::to_string(expected) +
                     " rows but the file holds " + std::to_string(rows.size()));
  }
  return rows;
}

// -- misc ------------------------------------------------------------------------------

std::string file_content_hash(const std::filesystem::path& path) {
  auto in = open_input(path);
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  char buffer[1 << 16];
  while (in.read(buffer, sizeof(buffer)) || in.gcount() > 0) {
    const auto n = in.gcount();
    for (std::streamsize i = 0; i < n; ++i) {
      hash ^= static_cast<unsigned char>(buffer[i]);
      hash *= 0x100000001b3ULL;
    }
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return std::string("fnv1a64:") + hex;
}

std::string format_double(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "0";
  return std::string(buffer, ptr);
}

}  // namespace metaqa
