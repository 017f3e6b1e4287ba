#include "vidiag/jsonio.h"

#include <cstdio>

namespace vidiag {

namespace {

void dump_value(const nlohmann::ordered_json& j, int depth, std::string& out) {
  const std::string pad(static_cast<size_t>(depth) * 2, ' ');
  const std::string pad_in(static_cast<size_t>(depth + 1) * 2, ' ');
  switch (j.type()) {
    case nlohmann::ordered_json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        out += pad_in;
        out += nlohmann::ordered_json(it.key()).dump();
        out += ": ";
        dump_value(it.value(), depth + 1, out);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += '}';
      return;
    }
    case nlohmann::ordered_json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        out += pad_in;
        dump_value(j[i], depth + 1, out);
        if (i + 1 < j.size()) out += ',';
        out += '\n';
      }
      out += pad;
      out += ']';
      return;
    }
    case nlohmann::ordered_json::value_t::number_float:
      out += format_fixed6(j.get<double>());
      return;
    default:
      // strings (with escaping), integers, booleans, null
      out += j.dump();
      return;
  }
}

}  // namespace

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  // Normalize "-0.000000" so equal values always render identically.
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string canonical_dump(const nlohmann::ordered_json& j) {
  std::string out;
  dump_value(j, 0, out);
  out += '\n';
  return out;
}

}  // namespace vidiag
