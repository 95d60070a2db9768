#pragma once

#include <filesystem>
#include <functional>
#include <json.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/deck.hpp"
#include "narrativeforge/embedding.hpp"
#include "narrativeforge/engine.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/rationale.hpp"
#include "narrativeforge/schema.hpp"
#include "narrativeforge/scoring.hpp"

namespace httplib {
class Server;
}

namespace narrativeforge {

struct Event {
  std::size_t seq = 0;
  std::string action;
  std::string at;
  nlohmann::json detail;
  // Workspace after the action, so a client can step back to it.
  std::optional<Perspective> workspace;
};

struct ConfirmedEntry {
  Perspective perspective;
  std::vector<RationaleDraft> rationales;
};

struct Session {
  std::string id;
  std::string created_at;
  std::optional<Corpus> corpus;
  std::optional<SelectionContext> selection;
  std::map<FrameworkKind, CandidateSet> candidate_sets;
  std::optional<Perspective> workspace;
  std::vector<RationaleDraft> drafts;  // for the current workspace, attached on confirm
  std::vector<ConfirmedEntry> confirmed;
  std::optional<DeckSpec> deck;
  std::vector<Event> event_log;

  void log(std::string action, nlohmann::json detail, const std::string& at);
};

void to_json(nlohmann::json& j, const Event& e);
void from_json(const nlohmann::json& j, Event& e);
void to_json(nlohmann::json& j, const Session& s);
void from_json(const nlohmann::json& j, Session& s);

/// One JSON file per session under `dir`. Writes go to a temp file that is
/// renamed into place, so a crash mid-write leaves the previous version.
class SessionStore {
 public:
  using IdSource = std::function<std::string()>;
  using Clock = std::function<std::string()>;

  explicit SessionStore(std::filesystem::path dir, IdSource ids = {}, Clock clock = {});

  Session create();
  void persist(const Session& s);
  Session load(const std::string& id) const;
  std::string load_bytes(const std::string& id) const;
  bool exists(const std::string& id) const;
  std::vector<std::string> list() const;

  // Id of the most recently created session; throws Error(not_found) when none.
  std::string latest() const;

  std::string now() const { return clock_(); }
  const std::filesystem::path& dir() const { return dir_; }

  // Test hook run between the temp write and the rename. Throwing from it
  // simulates a crash at that point.
  std::function<void(const std::filesystem::path& tmp)> before_rename;

 private:
  std::filesystem::path path_for(const std::string& id) const;

  std::filesystem::path dir_;
  IdSource ids_;
  Clock clock_;
};

std::string random_session_id();
std::string utc_timestamp();

struct ServiceConfig {
  ScoringOptions scoring;
  TopdownOptions topdown;
  UpdateOptions update;
  RationaleOptions rationale;
};

/// Session workflow: corpus, selection, generation, workspace edits, rationale,
/// confirmation and deck export. Mutations on one session are serialized;
/// LLM calls run without the session guard and are re-checked before commit.
class NarrativeService {
 public:
  NarrativeService(SessionStore& store, LlmClient& llm, EmbeddingProvider& embeddings, HttpFetcher* fetcher = nullptr,
                   ServiceConfig config = {});

  Session create_session();
  Session get_session(const std::string& id);

  // Body is a corpus document or {"scholar_url": "..."}.
  Session put_corpus(const std::string& id, const nlohmann::json& body);
  Categorization categorize(const std::string& id, const std::string& intent);
  SelectionContext select(const std::string& id, const std::vector<std::string>& ids, const std::string& focus,
                          const std::string& intent);
  CandidateSet generate(const std::string& id, FrameworkKind framework);

  // Body is {"perspective": {...}} or {"framework": "...", "index": n} picking a stored spark.
  Perspective set_workspace(const std::string& id, const nlohmann::json& body);
  Perspective set_lock(const std::string& id, const FieldKey& key, bool locked);
  // Direct user edit: {"key": k, "value": v} or {"assignments": {"0": [...], "1": [...]}}.
  Perspective edit_workspace(const std::string& id, const nlohmann::json& body);
  Perspective update_workspace(const std::string& id, const FieldKey& key);
  Perspective revert_workspace(const std::string& id, std::size_t seq);
  ScoreReport rescore(const std::string& id);
  RationaleDraft rationale(const std::string& id, const std::string& strategy);

  // Appends a deep copy of the workspace and its drafts; returns the new slides.
  std::vector<Slide> confirm(const std::string& id);
  DeckSpec deck(const std::string& id);

  SessionStore& store() { return store_; }

 private:
  std::mutex& guard(const std::string& id);

  template <class F>
  auto mutate(const std::string& id, F&& f);

  SessionStore& store_;
  LlmClient& llm_;
  EmbeddingProvider& embeddings_;
  HttpFetcher* fetcher_;
  ServiceConfig config_;
  Scorer scorer_;

  std::mutex guards_mu_;
  std::map<std::string, std::unique_ptr<std::mutex>> guards_;
};

// Builds the deck from confirmed entries: a title slide, then each perspective
// followed by its rationale slides.
DeckSpec build_deck(const Session& s);

// Problem-detail body for an error.
nlohmann::json problem_json(ErrorCode code, const std::string& detail);

void install_routes(httplib::Server& server, NarrativeService& service);

}  // namespace narrativeforge
