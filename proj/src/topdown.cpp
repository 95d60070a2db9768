#include <set>
#include <sstream>

#include "narrativeforge/engine.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/json_repair.hpp"

namespace narrativeforge {

using nlohmann::json;

std::string complete_with_retry(LlmClient& llm, const std::string& prompt, const LlmParams& params,
                                std::size_t retries) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return llm.complete(prompt, params);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::transport || !e.retryable() || attempt >= retries) throw;
    }
  }
}

namespace {

const char* progression_phrase(FrameworkKind kind) {
  switch (kind) {
    case FrameworkKind::parallel: return "how its Clusters form complementary facets.";
    case FrameworkKind::linear: return "how its Clusters form a progression.";
    case FrameworkKind::coordinate: return "how its Clusters spread across the two axes.";
    case FrameworkKind::circular: return "how its Clusters form a cycle.";
  }
  return "";
}

void write_cluster_schema(std::ostream& out, const char* theme, const char* description, const char* ids,
                          bool last) {
  out << "        {\n"
      << "          \"cluster_theme\": \"" << theme << "\",\n"
      << "          \"cluster_description\": \"" << description << "\",\n"
      << "          \"papers_assign\": " << ids << "\n"
      << "        }" << (last ? "\n" : ",\n");
}

void write_axes_schema(std::ostream& out) {
  out << "      \"axes\": {\n"
      << "        \"axis1\": {\"pole_a\": \"Pole A of dimension 1\", \"pole_b\": \"Pole B of dimension 1\"},\n"
      << "        \"axis2\": {\"pole_a\": \"Pole A of dimension 2\", \"pole_b\": \"Pole B of dimension 2\"},\n"
      << "        \"quadrant_of\": {\"0\": [\"a\", \"b\"], \"1\": [\"b\", \"a\"]}\n"
      << "      },\n";
}

}  // namespace

std::string build_topdown_prompt(const SelectionContext& ctx, const FrameworkSpec& spec) {
  const bool coordinate = spec.requires_axes;
  std::ostringstream out;
  out << "You are an AI assistant and an expert in Human Computer Interaction research. Your task is to "
         "help researchers structure a set of papers and craft coherent research narratives.\n\n";

  out << "# DATA & CONTEXT  \n"
      << "- Paper set               :\n";
  for (const auto& p : ctx.selected) {
    out << "  - ID: " << p.id << " | Title: " << p.title;
    if (!p.abstract_text.empty()) out << " | Abstract: " << p.abstract_text;
    out << "\n";
  }
  out << "- Overall research focus  : " << ctx.overall_focus << "  \n"
      << "- Researcher's intent     : " << ctx.researcher_intent << "  \n\n";

  out << "# KEY CONCEPTS  \n"
      << "- Contribution Statement: a high-level criterion that partitions the entire paper set into "
         "meaningful, non-overlapping dimensions.  \n"
      << "- Cluster: a subgroup of papers that share a distinctive feature under the same Contribution "
         "Statement.  \n"
      << "- Cluster Theme: the abstract feature (e.g., method, technology, user group) that defines a "
         "Cluster.  \n"
      << "- Paper: an individual publication, referenced only by its ID.  \n";
  if (coordinate) {
    out << "- Axis: a key dimension with two opposing poles; two Axes span the conceptual space in which "
           "Clusters are positioned.  \n";
  }
  out << "\n## Hierarchy\n"
      << "1. Contribution Statement > Clusters > Papers. Each Paper appears in every Contribution "
         "Statement but in exactly one Cluster per Contribution Statement (no overlaps). Together, the "
         "Clusters must cover the entire paper set.  \n\n";

  out << "## Rules for " << spec.display_name << " Framework  \n" << spec.relation_text << "\n\n";

  out << "# INSTRUCTIONS  \n"
      << "## Step 1: Differentiate Features Among Papers: \n"
      << "Examine each Paper to identify salient features (topics, technologies, research "
         "methodologies, target groups, interaction techniques, etc.).  \n\n"
      << "## Step 2: Form Preliminary Clusters and Abstract Cluster Themes\n"
      << "Group similar Papers into " << spec.cluster_range.min << " to " << spec.cluster_range.max
      << " Clusters. For each Cluster provide: 1) a concise, descriptive name (cluster_theme), and 2) a "
         "list of Paper IDs";
  if (coordinate) {
    out << ". Then name two Axes (each with two opposing poles, pole_a and pole_b) and place every "
           "Cluster in one quadrant by choosing a pole of each Axis (\"a\" or \"b\"), keyed by the "
           "Cluster's zero-based position";
  }
  out << "\n\n"
      << "## Step 3: Synthesize Contribution Statements  \n"
      << "Review the preliminary Clusters and abstract 4 to 6 higher-level, fundamental criteria that "
         "distinguish them. \n"
      << "These criteria become the contribution_statements.  \n\n"
      << "## Important Constraints  \n"
      << "- Focus on distinctions that genuinely help researchers articulate unique contributions.  \n"
      << "- Avoid excessively broad, vague, or redundant categories.  \n\n";

  out << "# OUTPUT FORMAT (strict JSON)  \n"
      << "Return only valid JSON. No extra keys, comments, or text. Follow exactly the schema below. Use "
         "only Paper IDs inside \"papers_assign\".  \n\n";
  out << "{\n"
      << "  \"contribution_statements\": [\n"
      << "    {\n"
      << "      \"contribution_statement\": \"Contribution Statement 1\",\n"
      << "      \"contribution_statement_description\": \"One-sentence explanation of this Contribution "
         "Statement and "
      << progression_phrase(spec.kind) << "\",\n";
  if (coordinate) write_axes_schema(out);
  out << "      \"clusters\": [\n";
  write_cluster_schema(out, "Cluster 1 Theme", "Brief explanation of the Cluster Theme.", "[\"id\", \"id\"]",
                       false);
  write_cluster_schema(out, "Cluster 2 Theme", "Brief explanation of the Cluster Theme.", "[\"id\", \"id\"]",
                       true);
  out << "      ]\n"
      << "    },\n"
      << "    {\n"
      << "      \"contribution_statement\": \"Contribution Statement 2\",\n"
      << "      \"contribution_statement_description\": \"...\",\n";
  if (coordinate) write_axes_schema(out);
  out << "      \"clusters\": [\n";
  write_cluster_schema(out, "Cluster 1 Theme", "...", "[\"id\"]", true);
  out << "      ]\n"
      << "    }\n"
      << "  ]\n"
      << "}\n";
  return out.str();
}

namespace {

const json* statements_array(const json& doc) {
  if (doc.is_array()) return &doc;
  if (doc.is_object()) {
    if (doc.contains("contribution_statements") && doc["contribution_statements"].is_array())
      return &doc["contribution_statements"];
  }
  return nullptr;
}

}  // namespace

TopdownParse parse_topdown_response(const std::string& text, const SelectionContext& ctx,
                                    const FrameworkSpec& spec) {
  auto repaired = repair::repair_json(text);
  if (!repaired) fail(ErrorCode::generation, "top-down response is not valid JSON after repair");

  json single;
  const json* items = statements_array(repaired->value);
  if (!items && repaired->value.is_object() && repaired->value.contains("contribution_statement")) {
    single = json::array({repaired->value});
    items = &single;
  }
  if (!items) fail(ErrorCode::generation, "top-down response has no contribution_statements array");

  TopdownParse result;
  result.repair_steps = repaired->steps;
  for (std::size_t i = 0; i < items->size(); ++i) {
    const auto& item = (*items)[i];
    Perspective p;
    try {
      if (!item.is_object()) fail(ErrorCode::validation, "candidate is not an object");
      json normalized = item;
      normalized["framework"] = to_string(spec.kind);
      normalized.erase("locks");
      if (!spec.requires_axes) normalized.erase("axes");
      p = normalized.get<Perspective>();
    } catch (const std::exception& e) {
      result.dropped.push_back({i, {std::string("malformed candidate: ") + e.what()}});
      continue;
    }
    auto report = validate_perspective(p, ctx);
    if (report.ok()) report.merge(check_structure(p));
    if (!report.ok()) {
      result.dropped.push_back({i, report.messages()});
      continue;
    }
    result.perspectives.push_back(std::move(p));
    result.generation_index.push_back(i);
  }

  if (result.perspectives.empty()) {
    std::string reasons;
    for (const auto& d : result.dropped) {
      for (const auto& r : d.reasons) {
        if (!reasons.empty()) reasons += "; ";
        reasons += "#" + std::to_string(d.index) + " " + r;
      }
    }
    fail(ErrorCode::generation, "no valid candidates in top-down response" +
                                    (reasons.empty() ? std::string() : ": " + reasons));
  }
  return result;
}

CandidateSet generate_candidates(const SelectionContext& ctx, FrameworkKind kind, LlmClient& llm,
                                 const Scorer& scorer, const TopdownOptions& options) {
  const auto& spec = framework_spec(kind);
  const auto prompt = build_topdown_prompt(ctx, spec);

  CandidateSet set;
  set.framework = kind;
  std::vector<RankedCandidate> pool;
  std::set<std::string> fingerprints;
  std::size_t index_offset = 0;

  const std::size_t calls = 1 + (options.retry_on_shortfall ? options.shortfall_retries : 0);
  for (std::size_t call = 0; call < calls; ++call) {
    auto params = options.params;
    if (call > 0 && params.seed) params.seed = *params.seed + call;
    const auto response = complete_with_retry(llm, prompt, params, options.transport_retries);

    TopdownParse parsed;
    try {
      parsed = parse_topdown_response(response, ctx, spec);
    } catch (const Error& e) {
      if (call == 0 || e.code() != ErrorCode::generation) throw;
      set.warnings.push_back(std::string("shortfall retry produced no candidates: ") + e.what());
      break;
    }
    std::size_t max_index = 0;
    for (auto d : parsed.dropped) {
      d.index += index_offset;
      max_index = std::max(max_index, d.index - index_offset + 1);
      set.dropped.push_back(std::move(d));
    }
    for (std::size_t i = 0; i < parsed.perspectives.size(); ++i) {
      max_index = std::max(max_index, parsed.generation_index[i] + 1);
      if (!fingerprints.insert(perspective_fingerprint(parsed.perspectives[i])).second) continue;
      RankedCandidate c;
      c.perspective = std::move(parsed.perspectives[i]);
      c.generation_index = index_offset + parsed.generation_index[i];
      c.report = scorer.score(c.perspective, ctx);
      pool.push_back(std::move(c));
    }
    index_offset += max_index;
    if (pool.size() >= options.keep) break;
  }

  set.survivors = pool.size();
  set.candidates = rank_candidates(std::move(pool), options.keep);
  if (set.survivors < options.keep) {
    set.warnings.push_back("shortfall: only " + std::to_string(set.survivors) + " valid candidate(s), wanted " +
                           std::to_string(options.keep));
  }
  return set;
}

void to_json(json& j, const DroppedCandidate& d) { j = json{{"index", d.index}, {"reasons", d.reasons}}; }

void from_json(const json& j, DroppedCandidate& d) {
  d.index = j.at("index").get<std::size_t>();
  d.reasons = j.at("reasons").get<std::vector<std::string>>();
}

void to_json(json& j, const RankedCandidate& c) {
  j = json{{"perspective", c.perspective}, {"score", c.report}, {"generation_index", c.generation_index}};
}

void from_json(const json& j, RankedCandidate& c) {
  c.perspective = j.at("perspective").get<Perspective>();
  c.report = j.at("score").get<ScoreReport>();
  c.generation_index = j.value("generation_index", std::size_t{0});
}

void to_json(json& j, const CandidateSet& s) {
  j = json{{"framework", to_string(s.framework)},
           {"candidates", s.candidates},
           {"survivors", s.survivors},
           {"warnings", s.warnings},
           {"dropped", s.dropped}};
}

void from_json(const json& j, CandidateSet& s) {
  s.framework = framework_from_string(j.at("framework").get<std::string>());
  s.candidates = j.at("candidates").get<std::vector<RankedCandidate>>();
  s.survivors = j.value("survivors", s.candidates.size());
  s.warnings = j.value("warnings", std::vector<std::string>{});
  s.dropped = j.value("dropped", std::vector<DroppedCandidate>{});
}

}  // namespace narrativeforge
