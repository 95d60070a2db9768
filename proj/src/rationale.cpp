#include "narrativeforge/rationale.hpp"

#include <sstream>

#include "narrativeforge/engine.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/json_repair.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;

std::string_view to_string(RhetoricalMode m) {
  switch (m) {
    case RhetoricalMode::ethos: return "ethos";
    case RhetoricalMode::pathos: return "pathos";
    case RhetoricalMode::logos: return "logos";
  }
  return "";
}

namespace {

RhetoricalMode mode_from_string(std::string_view s) {
  if (s == "ethos") return RhetoricalMode::ethos;
  if (s == "pathos") return RhetoricalMode::pathos;
  if (s == "logos") return RhetoricalMode::logos;
  fail(ErrorCode::validation, "unknown rhetorical mode '" + std::string(s) + "'");
}

}  // namespace

const std::vector<RationaleStrategy>& strategy_catalog() {
  using M = RhetoricalMode;
  static const std::vector<RationaleStrategy> catalog = {
      {M::ethos, "Literature Endorsement", "Cite established research that underscores the importance of this gap."},
      {M::ethos, "Industry/Academic Attention",
       "Show how academia or industry prioritizes this topic through funding, discussions, or publications."},
      {M::ethos, "Big Name's Quote", "Use expert endorsements to reinforce the significance of the problem."},
      {M::pathos, "Personal Experience", "Share a real-life story to make the issue more relatable and engaging."},
      {M::pathos, "Social Events",
       "Link the research to societal, political, or cultural events to highlight its relevance."},
      {M::pathos, "Common Values & Ethics",
       "Appeal to widely shared moral or ethical principles to justify the importance of this research."},
      {M::pathos, "Public Demand & Popularity",
       "Highlight growing public interest or widespread adoption to demonstrate the topic's timeliness."},
      {M::logos, "Data & Visualization",
       "Use statistics or visual evidence to illustrate the scale or urgency of the problem."},
      {M::logos, "Historical Patterns & Trends",
       "Show how this issue fits within broader technological advancements or ongoing trends."},
      {M::logos, "Demonstrating Impact", "Emphasize the tangible, long-term benefits of addressing this problem."},
      {M::logos, "Consequences of Inaction",
       "Highlight risks, negative outcomes, or missed opportunities if the problem is ignored."},
  };
  return catalog;
}

const RationaleStrategy& find_strategy(std::string_view name) {
  for (const auto& s : strategy_catalog())
    if (s.name == name) return s;
  fail(ErrorCode::not_found, "unknown rationale strategy '" + std::string(name) + "'");
}

void to_json(json& j, const RationaleStrategy& s) {
  j = json{{"category", to_string(s.category)}, {"name", s.name}, {"definition", s.definition}};
}

void from_json(const json& j, RationaleStrategy& s) {
  s.category = mode_from_string(j.at("category").get<std::string>());
  s.name = j.at("name").get<std::string>();
  s.definition = j.at("definition").get<std::string>();
}

void to_json(json& j, const RationaleDraft& d) {
  j = json{{"strategy", d.strategy}, {"narration", d.narration}, {"perspective_ref", d.perspective_ref}};
}

void from_json(const json& j, RationaleDraft& d) {
  d.strategy = j.at("strategy").get<RationaleStrategy>();
  d.narration = j.at("narration").get<std::string>();
  d.perspective_ref = j.value("perspective_ref", std::string{});
}

std::string build_rationale_prompt(const Perspective& p, const RationaleStrategy& s, const SelectionContext& ctx) {
  std::ostringstream out;
  out << "You are an AI assistant and an expert in Human Computer Interaction research. Your task is to "
         "help a researcher explain in a talk why their contribution matters.\n\n"
      << "# DATA & CONTEXT\n"
      << "- Overall research focus  : " << ctx.overall_focus << "\n"
      << "- Researcher's intent     : " << ctx.researcher_intent << "\n"
      << "- Contribution statement  : " << p.contribution_statement << "\n";
  if (!p.contribution_statement_description.empty())
    out << "- Statement description   : " << p.contribution_statement_description << "\n";
  out << "- Cluster themes          :\n";
  for (std::size_t i = 0; i < p.clusters.size(); ++i)
    out << "  " << (i + 1) << ". " << p.clusters[i].cluster_theme << "\n";
  out << "\n# RATIONALE STRATEGY\n"
      << "- Mode       : " << to_string(s.category) << "\n"
      << "- Strategy   : " << s.name << "\n"
      << "- Definition : " << s.definition << "\n\n"
      << "# INSTRUCTIONS\n"
      << "Write 3 to 6 sentences of spoken-style narration, to be read aloud on a single slide, that use "
         "this strategy to justify why the contribution statement is important. Where the strategy calls "
         "for quotations, figures, or events, write clearly marked placeholders the researcher can verify "
         "rather than inventing facts.\n\n"
      << "# OUTPUT\n"
      << "Return only the narration text. No headings, lists, or extra commentary.\n";
  return out.str();
}

namespace {

std::string clean_narration(const std::string& raw) {
  auto body = repair::strip_code_fences(raw);
  if (auto j = json::parse(body, nullptr, false); !j.is_discarded()) {
    if (j.is_string()) body = j.get<std::string>();
    if (j.is_object() && j.contains("narration") && j["narration"].is_string()) body = j["narration"].get<std::string>();
  }
  return text::normalize_whitespace(body);
}

}  // namespace

RationaleDraft generate_rationale(const Perspective& p, const RationaleStrategy& s, const SelectionContext& ctx,
                                  LlmClient& llm, const RationaleOptions& options) {
  const auto prompt = build_rationale_prompt(p, s, ctx);
  for (std::size_t attempt = 0; attempt <= options.retries; ++attempt) {
    auto narration = clean_narration(complete_with_retry(llm, prompt, options.params, 2));
    if (!narration.empty()) return RationaleDraft{s, std::move(narration), perspective_fingerprint(p)};
  }
  fail(ErrorCode::generation, "rationale narration for '" + s.name + "' was empty after " +
                                  std::to_string(options.retries + 1) + " attempt(s)");
}

std::vector<RationaleDraft> generate_rationales(const Perspective& p, const std::vector<RationaleStrategy>& strategies,
                                                const SelectionContext& ctx, LlmClient& llm,
                                                const RationaleOptions& options) {
  std::vector<RationaleDraft> out;
  out.reserve(strategies.size());
  for (const auto& s : strategies) out.push_back(generate_rationale(p, s, ctx, llm, options));
  return out;
}

}  // namespace narrativeforge
