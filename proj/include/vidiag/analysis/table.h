#pragma once

#include <array>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace vidiag::analysis {

/// Thrown on malformed CSV, duplicate row keys, out-of-range scores and
/// unreadable report directories. CLI maps it to exit code 2.
struct AnalysisError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResultRow {
  std::string system_id;
  std::string meta_id;
  std::string video_type;
  std::string profile_id;
  std::string checkpoint_id;
  std::string sub_metric;
  std::string dimension;
  double s = 0.0;
  double confidence = 0.0;
};

inline constexpr std::array<const char*, 9> kResultColumns = {
    "system_id", "meta_id",    "video_type", "profile_id", "checkpoint_id",
    "sub_metric", "dimension", "s",          "confidence"};

/// Immutable-once-built row store. append enforces the row invariants:
/// (system_id, meta_id, profile_id, checkpoint_id) unique, s in [0,1].
struct ResultTable {
  std::vector<ResultRow> rows;

  void append(ResultRow row);
  bool empty() const { return rows.empty(); }
};

// ---- CSV interchange (header row, UTF-8, RFC-4180 quoting)

std::string to_csv(const ResultTable& table);
ResultTable from_csv(const std::string& text);
ResultTable load_csv(const std::filesystem::path& path);
void save_csv(const ResultTable& table, const std::filesystem::path& path);

/// Splits one CSV record honoring quoted fields and doubled quotes.
std::vector<std::string> split_csv_record(const std::string& line);

// ---- report ingestion

/// Longest canonical video-type name that prefixes the meta id;
/// "unknown" when none matches.
std::string video_type_of_meta(const std::string& meta_id);

/// Walks <root>/<system_id>/**/report.json and flattens every checkpoint
/// result into one row, resolving sub_metric and dimension through the
/// builtin registry. Rows come out sorted by (system, meta, profile,
/// checkpoint) so ingestion order never leaks into downstream output.
ResultTable ingest_reports(const std::filesystem::path& root);

}  // namespace vidiag::analysis
