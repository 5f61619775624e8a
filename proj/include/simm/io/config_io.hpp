#pragma once

#include <string>
#include <string_view>

#include "simm/config.hpp"

namespace simm {

/// Parses `key = value` lines. '#' starts a comment, blank lines are
/// ignored, omitted keys keep their defaults, unknown or repeated keys are
/// errors. `preset = oscillation` selects a built-in base config wherever it
/// appears; the other keys override it. The result is validated.
/// Errors are ConfigError carrying the key and line.
WorldConfig parse_config(std::string_view text);

/// Every key with its value, one per line, in a fixed order. Parsing the
/// output yields an identical config. Derived thresholds that were never set
/// are written as `auto`.
std::string format_config(const WorldConfig& config);

WorldConfig load_config_file(const std::string& path);

}  // namespace simm
