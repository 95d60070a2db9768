#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "narrativeforge/embedding.hpp"
#include "narrativeforge/llm.hpp"

namespace narrativeforge {

struct PaperRecord {
  std::string id;
  std::string title;
  std::string abstract_text;
  std::string citation;
  std::optional<int> year;
  std::optional<std::string> venue;

  bool operator==(const PaperRecord&) const = default;
};

enum class CorpusSource { scholar_profile, local_file };

std::string_view to_string(CorpusSource s);
CorpusSource corpus_source_from_string(std::string_view s);

struct Corpus {
  std::vector<PaperRecord> papers;
  CorpusSource source = CorpusSource::local_file;
  // Non-fatal ingest notes (empty abstracts, skipped detail pages).
  std::vector<std::string> warnings;

  const PaperRecord* find(std::string_view id) const;
  bool contains(std::string_view id) const { return find(id) != nullptr; }
};

struct TopicTag {
  std::string label;
  std::vector<std::string> paper_ids;

  bool operator==(const TopicTag&) const = default;
};

struct SelectionContext {
  std::vector<PaperRecord> selected;
  std::string overall_focus;
  std::string researcher_intent;

  const PaperRecord* find(std::string_view id) const;
  std::vector<std::string> ids() const;
};

void to_json(nlohmann::json& j, const PaperRecord& p);
void from_json(const nlohmann::json& j, PaperRecord& p);
void to_json(nlohmann::json& j, const TopicTag& t);
void from_json(const nlohmann::json& j, TopicTag& t);
void to_json(nlohmann::json& j, const SelectionContext& c);
void from_json(const nlohmann::json& j, SelectionContext& c);

// Text used for a paper's embedding; title only when the abstract is empty.
std::string paper_text(const PaperRecord& p);

/// Parses the corpus interchange format
/// `{"papers":[{"id","title","abstract","citation","year"?,"venue"?}]}`.
/// Malformed JSON throws a parse error carrying the byte offset; duplicate ids
/// and missing titles throw validation errors. Empty abstracts are kept and
/// noted in Corpus::warnings.
Corpus parse_corpus_file(std::string_view bytes);

// Inverse of parse_corpus_file for the papers list.
std::string serialize_corpus(const Corpus& corpus);

// Structured corpus JSON (papers + source) for session storage.
nlohmann::json corpus_to_json(const Corpus& corpus);
Corpus corpus_from_json(const nlohmann::json& j);

struct HttpResponse {
  int status = 0;
  std::string body;
};

// Network failures throw Error(transport, retryable=true).
class HttpFetcher {
 public:
  virtual ~HttpFetcher() = default;
  virtual HttpResponse get(const std::string& url) = 0;
};

class HttplibFetcher : public HttpFetcher {
 public:
  HttpResponse get(const std::string& url) override;
};

/// Reads a Google Scholar profile page, then each publication's detail page
/// for its abstract. Detail pages that fail or carry no description leave the
/// abstract empty and add a warning.
Corpus fetch_scholar_profile(const std::string& url, HttpFetcher& transport);

struct Categorization {
  std::vector<TopicTag> tags;
  std::vector<std::string> warnings;
};

std::string build_categorize_prompt(const Corpus& corpus, const std::string& intent);

/// Asks the LLM for 2-6 topic tags (labels of at most 8 words). Unknown ids are
/// dropped; papers left uncovered join the tag whose label embedding is most
/// similar. Throws Error(categorization) when nothing usable comes back.
Categorization precategorize(const Corpus& corpus, const std::string& intent, LlmClient& llm,
                             EmbeddingProvider& embeddings);

// The "All papers" tag callers fall back to when categorization fails.
TopicTag single_tag_fallback(const Corpus& corpus);

SelectionContext build_selection_context(const Corpus& corpus, const std::vector<std::string>& ids,
                                         const std::string& focus, const std::string& intent);

}  // namespace narrativeforge
