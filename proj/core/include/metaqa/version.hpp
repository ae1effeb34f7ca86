#pragma once

namespace metaqa {

inline constexpr const char* kToolVersion = "1.0.0";

// Format-version tags. Every serialized artifact starts with one of these;
// readers refuse anything else, naming both expected and found versions.
inline constexpr const char* kRecordsFormat = "metaqa-records/1";
inline constexpr const char* kProfileFormat = "metaqa-profile/1";
inline constexpr const char* kModelFormat = "metaqa-model/1";
inline constexpr const char* kReportFormat = "metaqa-report/1";
inline constexpr const char* kFeaturesFormat = "metaqa-features/1";
inline constexpr const char* kPredictionsFormat = "metaqa-predictions/1";

// Default seed for every subcommand that draws randomness.
inline constexpr unsigned long long kDefaultSeed = 42;

}  // namespace metaqa
