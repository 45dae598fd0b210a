#pragma once

#include <istream>
#include <string>

#include "bdris/channel.hpp"

namespace bdris {

/// Parses `key = value` lines into a ScenarioConfig. Blank lines and text after
/// '#' are ignored; unknown keys and malformed values throw InvalidConfig with
/// the offending line number. The result is validated.
ScenarioConfig parse_config(std::istream& in, const std::string& source = "<stream>");
ScenarioConfig load_config(const std::string& path);

Architecture parse_architecture(const std::string& text);

}  // namespace bdris
