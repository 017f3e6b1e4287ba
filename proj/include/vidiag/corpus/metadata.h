#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "vidiag/corpus/types.h"

namespace vidiag::corpus {

/// Thrown when a metadata document cannot be parsed at all (malformed JSON,
/// wrong types, unknown video_type). Carries the byte/line position when the
/// underlying parser provides one.
struct MetadataParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Parses one metadata entry from its JSON text. Comment keys ("// ...")
/// are ignored at every level.
MetadataEntry parse_metadata(const std::string& json_text);
MetadataEntry load_metadata_file(const std::filesystem::path& path);

/// Checks every invariant of a parsed entry and reports each violation with
/// a path into the document. An empty report means the entry is valid.
ValidationReport validate_metadata(const MetadataEntry& entry);

/// Loads every *.json entry under a directory, validating each and checking
/// corpus-level uniqueness of meta_id. Violations are reported per file
/// path; parse failures are reported as violations too.
struct CorpusValidation {
  std::vector<MetadataEntry> entries;                      // the parseable ones
  std::vector<std::pair<std::string, Violation>> issues;   // (file, violation)
  bool ok() const { return issues.empty(); }
};
CorpusValidation validate_corpus_dir(const std::filesystem::path& dir);

/// Fraction of duration_sec that the per-shot script may undershoot.
inline constexpr double kDurationSlackFraction = 0.10;

}  // namespace vidiag::corpus
