#include <regex>
#include <sstream>

#include "narrativeforge/engine.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/json_repair.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;

std::string build_bottomup_prompt(const Perspective& p, const FieldKey& key, const SelectionContext& ctx,
                                  const std::string& feedback) {
  if (!p.has_field(key)) fail(ErrorCode::validation, "unknown field key '" + key.str() + "'");
  if (p.is_locked(key)) fail(ErrorCode::lock_violation, "field '" + key.str() + "' is locked");

  const auto& spec = framework_spec(p.framework);
  const auto payload = flatten_for_update(p, key);
  std::ostringstream out;

  out << "You are an AI assistant and an expert in Human-Computer Interaction research. You are given a "
         "structured research narrative that organizes papers into contribution statements and clusters. "
         "Your task is to refine the specific field indicated by key_to_modify, using the surrounding "
         "context for reasoning.\n\n\n";

  out << "# DATA & CONTEXT\n"
      << "The input is a JSON snippet that belongs to the following hierarchy: Contribution Statement > "
         "Clusters > Papers\n"
      << "- Overall research focus  : " << ctx.overall_focus << "\n"
      << "- Researcher's intent     : " << ctx.researcher_intent << "\n"
      << "- Paper set               :\n";
  for (const auto& paper : ctx.selected) out << "  - ID: " << paper.id << " | Title: " << paper.title << "\n";
  out << "\n";

  out << "# KEYS USED\n"
      << "- contribution_statement: A high-level category that groups multiple research themes  \n"
      << "- cluster_themeX: A specific research theme that falls under the contribution_statement  \n"
      << "- papers_assignX: A list of paper IDs assigned to the corresponding cluster  \n";
  if (p.axes) out << "- axes: The two dimensions of the conceptual space and each cluster's quadrant  \n";
  out << "- key_to_modify: The key whose value should be updated\n\n";

  out << "# INPUT FORMAT\n" << payload.dump(2) << "\n\n";

  if (!p.locks.empty()) {
    out << "# LOCKED KEYS\nThe researcher locked these fields; treat them as fixed context:";
    for (const auto& k : p.locks) out << " " << k.str();
    out << "\n\n";
  }

  out << "# INSTRUCTIONS\n"
      << "## Step 1: Examine the Context of key_to_modify: \n"
      << "- If it is a cluster_themeX: Examine the papers in the associated papers_assignX. Identify their "
         "shared characteristics (such as research method, user group, interaction type, or technology), "
         "and summarize them into a concise, meaningful cluster theme that reflects the essence of this "
         "group.\n"
      << "- If it is a papers_assignX: Based on the corresponding cluster_themeX and the overall "
         "contribution_statement, assign the most relevant papers from the dataset to this cluster. "
         "Ensure that the assignment is coherent with the theme and mutually exclusive with other "
         "clusters under the same contribution_statement.  \n"
      << "- If it is a contribution_statement: Consider all available cluster themes and papers to "
         "propose a more coherent and meaningful statement.\n\n"
      << "## Step 2: Check the Relationship Among Clusters:\n"
      << "- " << spec.relation_check_text << " \n"
      << "- Confirm that each paper appears in exactly one cluster within this contribution_statement.\n\n"
      << "## Step 3: Update the New Value\n"
      << "Locate the field indicated by key_to_modify. Replace its value with an improved one-line "
         "description. Do not modify any other fields.";
  if (!key.is_text()) out << " For a papers_assignX key the new value is a JSON array of Paper IDs.";
  out << "\n\n";

  out << "# OUTPUT\n"
      << "Return only the new value you assign to the key. No extra keys, comments, or text.\n\n"
      << "{new_value}\n";

  if (!feedback.empty()) {
    out << "\n# PREVIOUS ATTEMPT REJECTED\n"
        << "Your previous value was rejected: " << feedback << "\n"
        << "Return a corrected value for " << key.str() << ".\n";
  }
  return out.str();
}

namespace {

std::string strip_wrapping(std::string s) {
  s = text::trim(s);
  static const std::regex bullet_re(R"(^(?:[-*•]\s+|\d+[.)]\s+))");
  s = std::regex_replace(s, bullet_re, "");
  bool changed = true;
  while (changed && s.size() >= 2) {
    changed = false;
    static const std::pair<std::string, std::string> pairs[] = {
        {"**", "**"}, {"\"", "\""}, {"'", "'"}, {"`", "`"}, {"\xE2\x80\x9C", "\xE2\x80\x9D"}, {"*", "*"}};
    for (const auto& [open, close] : pairs) {
      if (s.size() >= open.size() + close.size() && s.compare(0, open.size(), open) == 0 &&
          s.compare(s.size() - close.size(), close.size(), close) == 0) {
        s = text::trim(s.substr(open.size(), s.size() - open.size() - close.size()));
        changed = true;
        break;
      }
    }
  }
  return s;
}

bool is_lead_in(const std::string& line) {
  const auto lower = text::to_lower_ascii(text::trim(line));
  if (lower.empty()) return true;
  if (lower.back() == ':' && text::word_count(lower) <= 10) return true;
  static const char* openers[] = {"here is", "here's", "sure", "certainly", "okay", "ok,", "of course"};
  for (const char* o : openers) {
    if (lower.rfind(o, 0) == 0 && (lower.back() == ':' || lower.back() == '.' || lower.back() == '!'))
      return true;
  }
  return false;
}

bool is_trailing_chatter(const std::string& line) {
  const auto lower = text::to_lower_ascii(text::trim(line));
  static const char* markers[] = {"let me know", "i hope", "hope this", "note:", "explanation:",
                                  "this theme", "this value", "this statement", "this captures", "(note"};
  for (const char* m : markers)
    if (lower.rfind(m, 0) == 0) return true;
  return false;
}

// Strips "Label: value" prefixes whose label names the key or the value.
std::string strip_label(const std::string& line, const FieldKey& key) {
  const auto colon = line.find(':');
  if (colon == std::string::npos || colon + 1 >= line.size()) return line;
  auto label = text::to_lower_ascii(strip_wrapping(line.substr(0, colon)));
  if (text::word_count(label) > 4) return line;
  const auto key_name = text::to_lower_ascii(key.str());
  static const std::regex label_re(
      R"(^(?:(?:new|updated|improved|revised|final|proposed)\s+)?(?:value|theme|cluster theme|statement|contribution statement|answer|output|result|title|key_to_modify|cluster_theme\d*|contribution_statement|papers_assign\d*)$)");
  if (label == key_name || std::regex_match(label, label_re)) return text::trim(line.substr(colon + 1));
  return line;
}

PartialValue parse_text_value(const std::string& raw, const FieldKey& key) {
  auto body = text::trim(repair::strip_code_fences(raw));

  // JSON string or {"key": "value"} object.
  if (auto j = json::parse(body, nullptr, false); !j.is_discarded()) {
    if (j.is_string()) body = j.get<std::string>();
    if (j.is_object()) {
      const auto key_name = key.str();
      for (const char* k : {key_name.c_str(), "new_value", "value"}) {
        if (j.contains(k) && j[k].is_string()) {
          body = j[k].get<std::string>();
          break;
        }
      }
      if (j.size() == 1 && j.begin()->is_string()) body = j.begin()->get<std::string>();
    }
  }

  std::vector<std::string> lines;
  for (auto& line : text::split_lines(body)) {
    auto t = text::trim(line);
    if (!t.empty()) lines.push_back(t);
  }
  while (lines.size() > 1 && is_lead_in(lines.front())) lines.erase(lines.begin());
  while (lines.size() > 1 && is_trailing_chatter(lines.back())) lines.pop_back();
  if (lines.size() != 1) {
    if (lines.empty()) fail(ErrorCode::parse, "empty value for " + key.str());
    fail(ErrorCode::parse, "ambiguous multi-line value for " + key.str());
  }

  auto value = strip_wrapping(strip_label(lines.front(), key));
  // A quoted key/value pair such as "cluster_theme1": "X".
  value = strip_wrapping(strip_label(value, key));
  if (value.empty()) fail(ErrorCode::parse, "empty value for " + key.str());
  if (is_lead_in(value) && value.back() == ':') fail(ErrorCode::parse, "no value after lead-in for " + key.str());
  return text::normalize_whitespace(value);
}

PartialValue parse_list_value(const std::string& raw, const FieldKey& key) {
  auto body = text::trim(repair::strip_code_fences(raw));
  json j;
  if (auto r = repair::repair_json(body)) j = std::move(r->value);
  if (j.is_object()) {
    json inner;
    const auto key_name = key.str();
    for (const char* k : {key_name.c_str(), "new_value", "value", "papers_assign"})
      if (j.contains(k)) {
        inner = j[k];
        break;
      }
    if (inner.is_null() && j.size() == 1) inner = j.begin().value();
    j = inner;
  }
  if (!j.is_array()) {
    const auto open = body.find('[');
    if (open == std::string::npos) fail(ErrorCode::parse, "no id list found for " + key.str());
    auto r = repair::repair_json(repair::extract_json_span(body.substr(open)));
    if (!r || !r->value.is_array()) fail(ErrorCode::parse, "unparsable id list for " + key.str());
    j = std::move(r->value);
  }
  std::vector<std::string> ids;
  for (const auto& item : j) {
    if (item.is_string())
      ids.push_back(text::trim(item.get<std::string>()));
    else if (item.is_number_integer())
      ids.push_back(std::to_string(item.get<long long>()));
    else
      fail(ErrorCode::parse, "id list for " + key.str() + " contains a non-id element");
  }
  if (ids.empty()) fail(ErrorCode::parse, "empty id list for " + key.str());
  return ids;
}

}  // namespace

PartialValue parse_bottomup_response(const std::string& text_in, const FieldKey& key) {
  if (text::trim(text_in).empty()) fail(ErrorCode::parse, "empty value for " + key.str());
  return key.is_text() ? parse_text_value(text_in, key) : parse_list_value(text_in, key);
}

UpdateOutcome request_partial_update(const Perspective& p, const FieldKey& key, const SelectionContext& ctx,
                                     LlmClient& llm, const UpdateOptions& options) {
  if (!p.has_field(key)) fail(ErrorCode::validation, "unknown field key '" + key.str() + "'");
  if (p.is_locked(key)) fail(ErrorCode::lock_violation, "field '" + key.str() + "' is locked");

  UpdateOutcome outcome{p, 0, false, {}};
  const auto current = field_value(p, key);
  std::string feedback;
  for (std::size_t attempt = 0; attempt <= options.retries; ++attempt) {
    ++outcome.attempts;
    const auto prompt = build_bottomup_prompt(p, key, ctx, feedback);
    const auto response = complete_with_retry(llm, prompt, options.params, options.transport_retries);
    try {
      auto value = parse_bottomup_response(response, key);
      if (value == current) {
        outcome.no_op = true;
        return outcome;
      }
      outcome.perspective = apply_partial_value(p, key, value, ctx);
      return outcome;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::parse && e.code() != ErrorCode::validation) throw;
      feedback = e.what();
      outcome.rejected.push_back(feedback);
    }
  }
  std::string reasons;
  for (const auto& r : outcome.rejected) reasons += (reasons.empty() ? "" : " | ") + r;
  fail(ErrorCode::update,
       "update of " + key.str() + " failed after " + std::to_string(outcome.attempts) + " attempt(s): " + reasons);
}

}  // namespace narrativeforge
