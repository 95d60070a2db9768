#include "narrativeforge/json_repair.hpp"

#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge::repair {

namespace {

std::optional<nlohmann::json> try_parse(std::string_view s) {
  auto j = nlohmann::json::parse(s.begin(), s.end(), nullptr, /*allow_exceptions=*/false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

}  // namespace

std::string strip_code_fences(std::string_view s) {
  const auto open = s.find("```");
  if (open == std::string_view::npos) return std::string(s);
  // Skip the info string ("json") on the fence line.
  auto body_start = s.find('\n', open);
  if (body_start == std::string_view::npos) return std::string(s);
  ++body_start;
  const auto close = s.find("```", body_start);
  auto body = s.substr(body_start, close == std::string_view::npos ? s.npos : close - body_start);
  return text::trim(body);
}

std::string extract_json_span(std::string_view s) {
  const auto start = s.find_first_of("{[");
  if (start == std::string_view::npos) return std::string(s);
  int depth = 0;
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = start; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '{' || c == '[') {
      ++depth;
    } else if (c == '}' || c == ']') {
      if (--depth == 0) return std::string(s.substr(start, i - start + 1));
    }
  }
  // Unbalanced: drop only the leading prose.
  return std::string(s.substr(start));
}

std::string remove_trailing_commas(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool in_string = false;
  bool escaped = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      out.push_back(c);
      if (escaped)
        escaped = false;
      else if (c == '\\')
        escaped = true;
      else if (c == '"')
        in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < s.size() && std::isspace(static_cast<unsigned char>(s[j]))) ++j;
      if (j < s.size() && (s[j] == '}' || s[j] == ']')) continue;
    }
    out.push_back(c);
  }
  return out;
}

std::string single_to_double_quotes(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  enum class State { code, dq, sq } state = State::code;
  bool escaped = false;
  for (char c : s) {
    switch (state) {
      case State::code:
        if (c == '"') {
          state = State::dq;
          out.push_back(c);
        } else if (c == '\'') {
          state = State::sq;
          out.push_back('"');
        } else {
          out.push_back(c);
        }
        break;
      case State::dq:
        out.push_back(c);
        if (escaped)
          escaped = false;
        else if (c == '\\')
          escaped = true;
        else if (c == '"')
          state = State::code;
        break;
      case State::sq:
        if (escaped) {
          // \' becomes a bare apostrophe inside the double-quoted string.
          if (c != '\'') out.push_back('\\');
          out.push_back(c);
          escaped = false;
        } else if (c == '\\') {
          escaped = true;
        } else if (c == '\'') {
          out.push_back('"');
          state = State::code;
        } else if (c == '"') {
          out += "\\\"";
        } else {
          out.push_back(c);
        }
        break;
    }
  }
  return out;
}

std::optional<Repaired> repair_json(std::string_view input) {
  if (auto j = try_parse(input)) return Repaired{std::move(*j), {}};

  struct Rung {
    const char* name;
    std::string (*apply)(std::string_view);
  };
  static constexpr Rung ladder[] = {
      {"code_fences", &strip_code_fences},
      {"surrounding_prose", &extract_json_span},
      {"trailing_commas", &remove_trailing_commas},
      {"single_quotes", &single_to_double_quotes},
  };

  std::string current(input);
  std::vector<std::string> steps;
  for (const auto& rung : ladder) {
    auto next = rung.apply(current);
    if (next == current) continue;
    current = std::move(next);
    steps.emplace_back(rung.name);
    if (auto j = try_parse(current)) return Repaired{std::move(*j), std::move(steps)};
  }
  return std::nullopt;
}

nlohmann::json parse_with_repair(std::string_view text) {
  if (auto r = repair_json(text)) return std::move(r->value);
  try {
    (void)nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorCode::parse, std::string("unparsable JSON after repair: ") + e.what());
  }
  fail(ErrorCode::parse, "unparsable JSON after repair");
}

}  // namespace narrativeforge::repair
