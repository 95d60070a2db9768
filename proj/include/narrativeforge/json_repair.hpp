#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace narrativeforge::repair {

// Individual ladder rungs, exposed for testing.
std::string strip_code_fences(std::string_view s);
std::string extract_json_span(std::string_view s);
std::string remove_trailing_commas(std::string_view s);
std::string single_to_double_quotes(std::string_view s);

struct Repaired {
  nlohmann::json value;
  std::vector<std::string> steps;  // names of rungs that were applied
};

/// Tries a strict parse, then applies the rungs cumulatively (code fences,
/// surrounding prose, trailing commas, single quotes) and re-parses after each.
std::optional<Repaired> repair_json(std::string_view text);

// As repair_json, but throws Error(parse) naming the strict-parse failure.
nlohmann::json parse_with_repair(std::string_view text);

}  // namespace narrativeforge::repair
