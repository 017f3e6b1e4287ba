#include "vidiag/media/types.h"

#include <sstream>
#include <stdexcept>

namespace vidiag::media {

const char* to_string(ToolStatus s) {
  switch (s) {
    case ToolStatus::success: return "success";
    case ToolStatus::fallback: return "fallback";
    case ToolStatus::failure: return "failure";
  }
  return "failure";
}

std::optional<ToolStatus> tool_status_from_string(const std::string& s) {
  if (s == "success") return ToolStatus::success;
  if (s == "fallback") return ToolStatus::fallback;
  if (s == "failure") return ToolStatus::failure;
  return std::nullopt;
}

std::string trace_to_jsonl(const std::vector<ToolOutcome>& trace) {
  std::string out;
  for (const auto& t : trace) {
    nlohmann::json j = {
        {"tool_name", t.tool_name},
        {"status", to_string(t.status)},
        {"latency_ms", t.latency_ms},
        {"note", t.note},
    };
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<ToolOutcome> trace_from_jsonl(const std::string& text) {
  std::vector<ToolOutcome> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    nlohmann::json j = nlohmann::json::parse(line);
    ToolOutcome t;
    t.tool_name = j.at("tool_name").get<std::string>();
    auto status = tool_status_from_string(j.at("status").get<std::string>());
    if (!status)
      throw std::runtime_error("trace line " + std::to_string(lineno) +
                               ": unknown status " + j.at("status").dump());
    t.status = *status;
    t.latency_ms = j.at("latency_ms").get<double>();
    t.note = j.at("note").get<std::string>();
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace vidiag::media
