#pragma once

#include <string>

#include "json.hpp"

namespace vidiag {

/// Canonical JSON rendering: 2-space indent, keys in insertion order,
/// every floating-point number printed with exactly 6 decimal places.
/// Rendering the same document always yields the same bytes, and a
/// parse of the output followed by a re-render is byte-identical.
std::string canonical_dump(const nlohmann::ordered_json& j);

/// Formats one double the way canonical_dump does ("%.6f").
std::string format_fixed6(double v);

}  // namespace vidiag
