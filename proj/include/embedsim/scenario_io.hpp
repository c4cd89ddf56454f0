#pragma once

#include <iosfwd>
#include <string>

#include "embedsim/scenario.hpp"

namespace embedsim {

// Parses a scenario document. Throws ParseError for malformed JSON and
// ValidationError (with a dotted field path) for schema violations,
// including keys the schema does not know about.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(std::istream& is);
Scenario load_scenario_file(const std::string& path);

// Canonical form: fixed key order, two-space indent, trailing newline.
// parse_scenario(serialize_scenario(sc)) reproduces sc exactly.
std::string serialize_scenario(const Scenario& scenario);

}  // namespace embedsim
