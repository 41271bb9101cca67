#pragma once

namespace dialaudit {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kCorpusFormatVersion = 1;
inline constexpr int kIndexFormatVersion = 1;
inline constexpr int kReportSchemaVersion = 1;
inline constexpr int kPruneFormatVersion = 1;

}  // namespace dialaudit
