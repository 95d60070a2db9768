#include "narrativeforge/corpus.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "narrativeforge/error.hpp"
#include "narrativeforge/json_repair.hpp"
#include "narrativeforge/scoring.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;

std::string_view to_string(CorpusSource s) {
  return s == CorpusSource::scholar_profile ? "scholar_profile" : "local_file";
}

CorpusSource corpus_source_from_string(std::string_view s) {
  if (s == "scholar_profile") return CorpusSource::scholar_profile;
  if (s == "local_file") return CorpusSource::local_file;
  fail(ErrorCode::validation, "unknown corpus source '" + std::string(s) + "'");
}

const PaperRecord* Corpus::find(std::string_view id) const {
  for (const auto& p : papers)
    if (p.id == id) return &p;
  return nullptr;
}

const PaperRecord* SelectionContext::find(std::string_view id) const {
  for (const auto& p : selected)
    if (p.id == id) return &p;
  return nullptr;
}

std::vector<std::string> SelectionContext::ids() const {
  std::vector<std::string> out;
  out.reserve(selected.size());
  for (const auto& p : selected) out.push_back(p.id);
  return out;
}

void to_json(json& j, const PaperRecord& p) {
  j = json{{"id", p.id}, {"title", p.title}, {"abstract", p.abstract_text}, {"citation", p.citation}};
  if (p.year) j["year"] = *p.year;
  if (p.venue) j["venue"] = *p.venue;
}

void from_json(const json& j, PaperRecord& p) {
  p.id = j.at("id").get<std::string>();
  p.title = j.at("title").get<std::string>();
  p.abstract_text = j.value("abstract", std::string{});
  p.citation = j.value("citation", std::string{});
  p.year = j.contains("year") && !j["year"].is_null() ? std::optional<int>(j["year"].get<int>())
                                                      : std::nullopt;
  p.venue = j.contains("venue") && !j["venue"].is_null()
                ? std::optional<std::string>(j["venue"].get<std::string>())
                : std::nullopt;
}

void to_json(json& j, const TopicTag& t) { j = json{{"label", t.label}, {"paper_ids", t.paper_ids}}; }

void from_json(const json& j, TopicTag& t) {
  t.label = j.at("label").get<std::string>();
  t.paper_ids = j.at("paper_ids").get<std::vector<std::string>>();
}

void to_json(json& j, const SelectionContext& c) {
  j = json{{"selected", c.selected},
           {"overall_focus", c.overall_focus},
           {"researcher_intent", c.researcher_intent}};
}

void from_json(const json& j, SelectionContext& c) {
  c.selected = j.at("selected").get<std::vector<PaperRecord>>();
  c.overall_focus = j.at("overall_focus").get<std::string>();
  c.researcher_intent = j.at("researcher_intent").get<std::string>();
}

std::string paper_text(const PaperRecord& p) {
  if (text::trim(p.abstract_text).empty()) return p.title;
  return p.title + ". " + p.abstract_text;
}

namespace {

PaperRecord record_from_entry(const json& entry, std::size_t index) {
  const auto where = "papers[" + std::to_string(index) + "]";
  if (!entry.is_object()) fail(ErrorCode::validation, where + " is not an object");
  auto string_field = [&](const char* key, bool required) -> std::string {
    if (!entry.contains(key) || entry[key].is_null()) {
      if (required) fail(ErrorCode::validation, where + " is missing '" + key + "'");
      return {};
    }
    if (!entry[key].is_string()) fail(ErrorCode::validation, where + "." + key + " must be a string");
    return entry[key].get<std::string>();
  };

  PaperRecord p;
  p.id = string_field("id", true);
  if (p.id.empty()) fail(ErrorCode::validation, where + " has an empty id");
  p.title = string_field("title", false);
  if (text::trim(p.title).empty())
    fail(ErrorCode::validation, "paper '" + p.id + "' is missing a title");
  p.abstract_text = string_field("abstract", false);
  p.citation = string_field("citation", false);
  if (entry.contains("year") && !entry["year"].is_null()) {
    if (!entry["year"].is_number_integer())
      fail(ErrorCode::validation, where + ".year must be an integer");
    p.year = entry["year"].get<int>();
  }
  if (entry.contains("venue") && !entry["venue"].is_null()) p.venue = string_field("venue", false);
  return p;
}

}  // namespace

Corpus parse_corpus_file(std::string_view bytes) {
  if (bytes.size() >= 3 && static_cast<unsigned char>(bytes[0]) == 0xEF &&
      static_cast<unsigned char>(bytes[1]) == 0xBB && static_cast<unsigned char>(bytes[2]) == 0xBF)
    fail(ErrorCode::parse, "corpus file starts with a UTF-8 BOM at byte 0");

  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    fail(ErrorCode::parse, "malformed corpus JSON at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("papers") || !doc["papers"].is_array())
    fail(ErrorCode::validation, "corpus JSON must be an object with a 'papers' array");

  Corpus corpus;
  corpus.source = CorpusSource::local_file;
  std::set<std::string> seen;
  const auto& entries = doc["papers"];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto p = record_from_entry(entries[i], i);
    if (!seen.insert(p.id).second) fail(ErrorCode::validation, "duplicate paper id '" + p.id + "'");
    if (text::trim(p.abstract_text).empty())
      corpus.warnings.push_back("paper '" + p.id + "' has an empty abstract; title-only text is used");
    corpus.papers.push_back(std::move(p));
  }
  return corpus;
}

std::string serialize_corpus(const Corpus& corpus) {
  return json{{"papers", corpus.papers}}.dump(2) + "\n";
}

json corpus_to_json(const Corpus& corpus) {
  return json{{"papers", corpus.papers},
              {"source", to_string(corpus.source)},
              {"warnings", corpus.warnings}};
}

Corpus corpus_from_json(const json& j) {
  Corpus c;
  c.papers = j.at("papers").get<std::vector<PaperRecord>>();
  c.source = corpus_source_from_string(j.value("source", std::string("local_file")));
  c.warnings = j.value("warnings", std::vector<std::string>{});
  return c;
}

std::string build_categorize_prompt(const Corpus& corpus, const std::string& intent) {
  std::ostringstream out;
  out << "You are an AI assistant and an expert in Human Computer Interaction research. "
         "Your task is to help a researcher browse their publications by topic.\n\n"
      << "# TOPIC CATEGORIZATION\n"
      << "- Researcher's intent : " << intent << "\n"
      << "- Paper set :\n";
  for (const auto& p : corpus.papers) out << "  - ID: " << p.id << " | Title: " << p.title << "\n";
  out << "\n# INSTRUCTIONS\n"
      << "Group the papers into 2 to 6 topics that help the researcher find papers relevant to "
         "the intent. A paper may carry more than one topic, and every paper must carry at least "
         "one. Each topic label has at most 8 words.\n\n"
      << "# OUTPUT (JSON)\n"
      << "Return only valid JSON of the form "
         "{\"tags\": [{\"label\": \"Topic label\", \"paper_ids\": [\"id\", \"id\"]}]}\n";
  return out.str();
}

TopicTag single_tag_fallback(const Corpus& corpus) {
  TopicTag tag{"All papers", {}};
  for (const auto& p : corpus.papers) tag.paper_ids.push_back(p.id);
  return tag;
}

Categorization precategorize(const Corpus& corpus, const std::string& intent, LlmClient& llm,
                             EmbeddingProvider& embeddings) {
  if (corpus.papers.empty()) fail(ErrorCode::validation, "cannot categorize an empty corpus");
  Categorization result;
  if (corpus.papers.size() == 1) {
    result.tags.push_back(single_tag_fallback(corpus));
    return result;
  }

  const auto response = llm.complete(build_categorize_prompt(corpus, intent), LlmParams{});
  json doc;
  try {
    doc = repair::parse_with_repair(response);
  } catch (const Error& e) {
    fail(ErrorCode::categorization, std::string("topic categorization failed: ") + e.what());
  }
  const json* raw_tags = nullptr;
  if (doc.is_array())
    raw_tags = &doc;
  else if (doc.is_object() && doc.contains("tags") && doc["tags"].is_array())
    raw_tags = &doc["tags"];
  if (raw_tags == nullptr) fail(ErrorCode::categorization, "topic categorization response has no 'tags' array");

  std::map<std::string, std::size_t> order;
  for (std::size_t i = 0; i < corpus.papers.size(); ++i) order[corpus.papers[i].id] = i;

  for (const auto& raw : *raw_tags) {
    if (!raw.is_object() || !raw.contains("label") || !raw["label"].is_string()) {
      result.warnings.push_back("skipped a tag without a label");
      continue;
    }
    TopicTag tag;
    tag.label = text::normalize_whitespace(raw["label"].get<std::string>());
    if (tag.label.empty()) {
      result.warnings.push_back("skipped a tag with an empty label");
      continue;
    }
    if (text::word_count(tag.label) > 8) {
      tag.label = text::first_words(tag.label, 8);
      result.warnings.push_back("tag label truncated to 8 words: '" + tag.label + "'");
    }
    std::set<std::string> ids;
    if (raw.contains("paper_ids") && raw["paper_ids"].is_array()) {
      for (const auto& id : raw["paper_ids"]) {
        if (!id.is_string()) continue;
        auto s = id.get<std::string>();
        if (!order.count(s)) {
          result.warnings.push_back("unknown id '" + s + "' dropped from tag '" + tag.label + "'");
          continue;
        }
        ids.insert(s);
      }
    }
    if (ids.empty()) {
      result.warnings.push_back("tag '" + tag.label + "' has no known papers; dropped");
      continue;
    }
    tag.paper_ids.assign(ids.begin(), ids.end());
    result.tags.push_back(std::move(tag));
  }
  if (result.tags.empty()) fail(ErrorCode::categorization, "topic categorization produced no usable tags");
  if (result.tags.size() > 6) {
    result.warnings.push_back("kept the first 6 of " + std::to_string(result.tags.size()) + " tags");
    result.tags.resize(6);
  }

  std::set<std::string> covered;
  for (const auto& t : result.tags) covered.insert(t.paper_ids.begin(), t.paper_ids.end());
  std::vector<const PaperRecord*> uncovered;
  for (const auto& p : corpus.papers)
    if (!covered.count(p.id)) uncovered.push_back(&p);

  if (!uncovered.empty()) {
    std::vector<std::string> texts;
    for (const auto& t : result.tags) texts.push_back(t.label);
    for (const auto* p : uncovered) texts.push_back(paper_text(*p));
    const auto vecs = embeddings.embed(texts);
    const auto n_tags = result.tags.size();
    for (std::size_t u = 0; u < uncovered.size(); ++u) {
      std::size_t best = 0;
      double best_cos = -2.0;
      for (std::size_t t = 0; t < n_tags; ++t) {
        const double c = cosine_similarity(vecs[n_tags + u], vecs[t]);
        if (c > best_cos) {
          best_cos = c;
          best = t;
        }
      }
      result.tags[best].paper_ids.push_back(uncovered[u]->id);
      result.warnings.push_back("paper '" + uncovered[u]->id + "' was uncovered; added to tag '" +
                                result.tags[best].label + "'");
    }
  }

  for (auto& t : result.tags) {
    std::sort(t.paper_ids.begin(), t.paper_ids.end(),
              [&](const std::string& a, const std::string& b) { return order.at(a) < order.at(b); });
  }
  return result;
}

SelectionContext build_selection_context(const Corpus& corpus, const std::vector<std::string>& ids,
                                         const std::string& focus, const std::string& intent) {
  if (ids.empty()) fail(ErrorCode::validation, "selection must contain at least one paper");
  if (text::trim(focus).empty()) fail(ErrorCode::validation, "overall research focus must not be empty");
  if (text::trim(intent).empty()) fail(ErrorCode::validation, "researcher intent must not be empty");
  std::set<std::string> wanted;
  for (const auto& id : ids) {
    if (!corpus.contains(id)) fail(ErrorCode::validation, "unknown paper id '" + id + "'");
    wanted.insert(id);
  }
  SelectionContext ctx;
  ctx.overall_focus = focus;
  ctx.researcher_intent = intent;
  for (const auto& p : corpus.papers)
    if (wanted.count(p.id)) ctx.selected.push_back(p);
  return ctx;
}

}  // namespace narrativeforge
