#include "vidiag/analysis/table.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "vidiag/corpus/types.h"
#include "vidiag/diagnosis/report.h"
#include "vidiag/rubric/registry.h"

namespace vidiag::analysis {

namespace fs = std::filesystem;

namespace {

std::string row_key(const ResultRow& r) {
  return r.system_id + '\x1f' + r.meta_id + '\x1f' + r.profile_id + '\x1f' + r.checkpoint_id;
}

bool needs_quoting(const std::string& field) {
  return field.find_first_of(",\"\r\n") != std::string::npos;
}

std::string quote_field(const std::string& field) {
  if (!needs_quoting(field)) return field;
  std::string out = "\"";
  for (char c : field) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

std::string format_number(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_number(const std::string& field, const std::string& column) {
  double v = 0.0;
  const char* first = field.c_str();
  const char* last = first + field.size();
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc{} || res.ptr != last)
    throw AnalysisError("column '" + column + "': not a number: '" + field + "'");
  return v;
}

/// RFC-4180 state machine over the whole document; quoted fields may
/// contain commas, doubled quotes and line breaks.
std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_was_quoted = false;

  const auto end_field = [&] {
    record.push_back(field);
    field.clear();
    field_was_quoted = false;
  };
  const auto end_record = [&] {
    end_field();
    const bool blank = record.size() == 1 && record[0].empty();
    if (!blank) records.push_back(record);
    record.clear();
  };

  for (size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
    } else if (c == '"') {
      if (!field.empty() || field_was_quoted)
        throw AnalysisError("stray quote inside unquoted field");
      in_quotes = true;
      field_was_quoted = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
    }
  }
  if (in_quotes) throw AnalysisError("unterminated quoted field");
  if (!field.empty() || !record.empty()) end_record();
  return records;
}

}  // namespace

void ResultTable::append(ResultRow row) {
  if (row.s < 0.0 || row.s > 1.0)
    throw AnalysisError("row " + row_key(row) + ": s out of [0,1]");
  if (row.confidence < 0.0 || row.confidence > 1.0)
    throw AnalysisError("row " + row_key(row) + ": confidence out of [0,1]");
  const std::string key = row_key(row);
  for (const auto& existing : rows)
    if (row_key(existing) == key)
      throw AnalysisError("duplicate row key: " + key);
  rows.push_back(std::move(row));
}

std::vector<std::string> split_csv_record(const std::string& line) {
  const auto records = parse_csv(line.empty() ? line : line + "\n");
  if (records.empty()) return {};
  if (records.size() != 1) throw AnalysisError("expected a single CSV record");
  return records[0];
}

std::string to_csv(const ResultTable& table) {
  std::ostringstream out;
  for (size_t i = 0; i < kResultColumns.size(); ++i)
    out << (i ? "," : "") << kResultColumns[i];
  out << "\n";
  for (const auto& r : table.rows) {
    out << quote_field(r.system_id) << ',' << quote_field(r.meta_id) << ','
        << quote_field(r.video_type) << ',' << quote_field(r.profile_id) << ','
        << quote_field(r.checkpoint_id) << ',' << quote_field(r.sub_metric) << ','
        << quote_field(r.dimension) << ',' << format_number(r.s) << ','
        << format_number(r.confidence) << "\n";
  }
  return out.str();
}

ResultTable from_csv(const std::string& text) {
  const auto records = parse_csv(text);
  if (records.empty()) throw AnalysisError("CSV has no header row");
  const auto& header = records[0];
  if (header.size() != kResultColumns.size())
    throw AnalysisError("CSV header has " + std::to_string(header.size()) +
                        " columns, expected " + std::to_string(kResultColumns.size()));
  for (size_t i = 0; i < kResultColumns.size(); ++i)
    if (header[i] != kResultColumns[i])
      throw AnalysisError("CSV column " + std::to_string(i) + " is '" + header[i] +
                          "', expected '" + kResultColumns[i] + "'");
  ResultTable table;
  for (size_t n = 1; n < records.size(); ++n) {
    const auto& f = records[n];
    if (f.size() != kResultColumns.size())
      throw AnalysisError("CSV record " + std::to_string(n) + " has " +
                          std::to_string(f.size()) + " fields");
    ResultRow row;
    row.system_id = f[0];
    row.meta_id = f[1];
    row.video_type = f[2];
    row.profile_id = f[3];
    row.checkpoint_id = f[4];
    row.sub_metric = f[5];
    row.dimension = f[6];
    row.s = parse_number(f[7], "s");
    row.confidence = parse_number(f[8], "confidence");
    table.append(std::move(row));
  }
  return table;
}

ResultTable load_csv(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw AnalysisError("cannot read CSV file: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_csv(ss.str());
}

void save_csv(const ResultTable& table, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw AnalysisError("cannot write CSV file: " + path.string());
  out << to_csv(table);
}

std::string video_type_of_meta(const std::string& meta_id) {
  static const std::vector<std::string> names = [] {
    using corpus::VideoType;
    std::vector<std::string> v;
    for (VideoType t : {VideoType::narrative, VideoType::commercial, VideoType::educational,
                        VideoType::scifi, VideoType::cinematic, VideoType::action,
                        VideoType::daily_life})
      v.push_back(corpus::to_string(t));
    return v;
  }();
  std::string best = "unknown";
  size_t best_len = 0;
  for (const auto& name : names)
    if (name.size() > best_len && meta_id.rfind(name, 0) == 0) {
      best = name;
      best_len = name.size();
    }
  return best;
}

ResultTable ingest_reports(const fs::path& root) {
  if (!fs::is_directory(root))
    throw AnalysisError("not a report directory: " + root.string());

  std::vector<fs::path> systems;
  for (const auto& e : fs::directory_iterator(root))
    if (e.is_directory()) systems.push_back(e.path());
  std::sort(systems.begin(), systems.end());

  std::vector<ResultRow> rows;
  const auto& registry = rubric::builtin_registry();
  for (const auto& system_dir : systems) {
    std::vector<fs::path> reports;
    for (const auto& e : fs::recursive_directory_iterator(system_dir))
      if (e.is_regular_file() && e.path().filename() == "report.json")
        reports.push_back(e.path());
    std::sort(reports.begin(), reports.end());

    for (const auto& path : reports) {
      std::ifstream in(path, std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      diagnosis::DiagnosisReport report;
      try {
        report = diagnosis::parse_report(ss.str());
      } catch (const std::exception& e) {
        throw AnalysisError("bad report " + path.string() + ": " + e.what());
      }
      for (const auto& cr : report.checkpoint_results) {
        const rubric::Checkpoint* cp = registry.find(cr.checkpoint_id);
        if (cp == nullptr)
          throw AnalysisError("report " + path.string() + ": unknown checkpoint '" +
                              cr.checkpoint_id + "'");
        ResultRow row;
        row.system_id = system_dir.filename().string();
        row.meta_id = report.meta_id;
        row.video_type = video_type_of_meta(report.meta_id);
        row.profile_id = report.profile_id;
        row.checkpoint_id = cr.checkpoint_id;
        row.sub_metric = cp->sub_metric;
        row.dimension = cp->dimension;
        row.s = cr.s;
        row.confidence = cr.confidence;
        rows.push_back(std::move(row));
      }
    }
  }
  std::sort(rows.begin(), rows.end(), [](const ResultRow& a, const ResultRow& b) {
    return row_key(a) < row_key(b);
  });
  ResultTable table;
  for (auto& row : rows) table.append(std::move(row));
  return table;
}

}  // namespace vidiag::analysis
