#include "narrativeforge/service.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <random>
#include <regex>
#include <sstream>

#include "narrativeforge/error.hpp"
#include "narrativeforge/fsio.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;
namespace fs = std::filesystem;

void Session::log(std::string action, json detail, const std::string& at) {
  event_log.push_back(Event{event_log.size() + 1, std::move(action), at, std::move(detail), workspace});
}

void to_json(json& j, const Event& e) {
  j = json{{"seq", e.seq}, {"action", e.action}, {"at", e.at}, {"detail", e.detail},
           {"workspace", e.workspace ? json(*e.workspace) : json(nullptr)}};
}

void from_json(const json& j, Event& e) {
  e.seq = j.at("seq").get<std::size_t>();
  e.action = j.at("action").get<std::string>();
  e.at = j.value("at", std::string{});
  e.detail = j.value("detail", json::object());
  e.workspace.reset();
  if (j.contains("workspace") && !j["workspace"].is_null()) e.workspace = j["workspace"].get<Perspective>();
}

namespace {

template <class T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

bool present(const json& j, const char* key) { return j.contains(key) && !j[key].is_null(); }

}  // namespace

void to_json(json& j, const Session& s) {
  json sets = json::object();
  for (const auto& [kind, set] : s.candidate_sets) sets[std::string(to_string(kind))] = set;
  json confirmed = json::array();
  for (const auto& c : s.confirmed) confirmed.push_back({{"perspective", c.perspective}, {"rationales", c.rationales}});
  j = json{{"id", s.id},
           {"created_at", s.created_at},
           {"corpus", s.corpus ? corpus_to_json(*s.corpus) : json(nullptr)},
           {"selection", optional_json(s.selection)},
           {"candidate_sets", std::move(sets)},
           {"workspace", optional_json(s.workspace)},
           {"drafts", s.drafts},
           {"confirmed", std::move(confirmed)},
           {"deck", optional_json(s.deck)},
           {"event_log", s.event_log}};
}

void from_json(const json& j, Session& s) {
  s = Session{};
  s.id = j.at("id").get<std::string>();
  s.created_at = j.value("created_at", std::string{});
  if (present(j, "corpus")) s.corpus = corpus_from_json(j["corpus"]);
  if (present(j, "selection")) s.selection = j["selection"].get<SelectionContext>();
  const auto sets = j.value("candidate_sets", json::object());
  for (const auto& [name, set] : sets.items()) s.candidate_sets[framework_from_string(name)] = set.get<CandidateSet>();
  if (present(j, "workspace")) s.workspace = j["workspace"].get<Perspective>();
  s.drafts = j.value("drafts", std::vector<RationaleDraft>{});
  const auto confirmed = j.value("confirmed", json::array());
  for (const auto& c : confirmed)
    s.confirmed.push_back({c.at("perspective").get<Perspective>(), c.value("rationales", std::vector<RationaleDraft>{})});
  if (present(j, "deck")) s.deck = j["deck"].get<DeckSpec>();
  s.event_log = j.value("event_log", std::vector<Event>{});
}

std::string random_session_id() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard lk(mu);
  return text::hex64(rng());
}

std::string utc_timestamp() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

SessionStore::SessionStore(fs::path dir, IdSource ids, Clock clock)
    : dir_(std::move(dir)), ids_(ids ? std::move(ids) : IdSource(random_session_id)),
      clock_(clock ? std::move(clock) : Clock(utc_timestamp)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
  if (ec) fail(ErrorCode::storage, "cannot create session store " + dir_.string() + ": " + ec.message());
}

fs::path SessionStore::path_for(const std::string& id) const {
  static const std::regex id_re("[A-Za-z0-9_-]{1,64}");
  if (!std::regex_match(id, id_re)) fail(ErrorCode::not_found, "unknown session '" + id + "'");
  return dir_ / (id + ".json");
}

Session SessionStore::create() {
  Session s;
  for (int attempt = 0; attempt < 16; ++attempt) {
    s.id = ids_();
    if (!exists(s.id)) break;
    if (attempt == 15) fail(ErrorCode::storage, "could not allocate a fresh session id");
  }
  s.created_at = clock_();
  s.log("create", json::object(), s.created_at);
  persist(s);
  write_file_atomic((dir_ / "LATEST").string(), s.id + "\n");
  return s;
}

void SessionStore::persist(const Session& s) {
  const auto path = path_for(s.id);
  const auto tmp = fs::path(path.string() + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::storage, "cannot write " + tmp.string());
    out << json(s).dump(2) << "\n";
    out.flush();
    if (!out) fail(ErrorCode::storage, "short write to " + tmp.string());
  }
  if (before_rename) before_rename(tmp);
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) fail(ErrorCode::storage, "cannot replace " + path.string() + ": " + ec.message());
}

std::string SessionStore::load_bytes(const std::string& id) const {
  const auto path = path_for(id);
  if (!fs::exists(path)) fail(ErrorCode::not_found, "unknown session '" + id + "'");
  return read_file(path.string());
}

Session SessionStore::load(const std::string& id) const {
  const auto bytes = load_bytes(id);
  auto j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::storage, "session file for '" + id + "' is corrupt");
  return j.get<Session>();
}

bool SessionStore::exists(const std::string& id) const { return fs::exists(path_for(id)); }

std::vector<std::string> SessionStore::list() const {
  std::vector<std::string> ids;
  for (const auto& entry : fs::directory_iterator(dir_))
    if (entry.is_regular_file() && entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string SessionStore::latest() const {
  const auto path = dir_ / "LATEST";
  if (!fs::exists(path)) fail(ErrorCode::not_found, "no sessions in " + dir_.string());
  return text::trim(read_file(path.string()));
}

DeckSpec build_deck(const Session& s) {
  if (!s.selection) fail(ErrorCode::validation, "no selection");
  DeckSpec deck;
  deck.meta = DeckMeta{s.selection->overall_focus, s.created_at, engine_version()};
  deck.slides.push_back(title_slide(s.selection->overall_focus, s.selection->researcher_intent));
  for (const auto& entry : s.confirmed) {
    deck.slides.push_back(deck_from_perspective(entry.perspective, *s.selection));
    for (const auto& d : entry.rationales) deck.slides.push_back(rationale_slide(d));
  }
  return deck;
}

NarrativeService::NarrativeService(SessionStore& store, LlmClient& llm, EmbeddingProvider& embeddings,
                                   HttpFetcher* fetcher, ServiceConfig config)
    : store_(store), llm_(llm), embeddings_(embeddings), fetcher_(fetcher), config_(config),
      scorer_(embeddings, config.scoring) {}

std::mutex& NarrativeService::guard(const std::string& id) {
  std::lock_guard lk(guards_mu_);
  auto& slot = guards_[id];
  if (!slot) slot = std::make_unique<std::mutex>();
  return *slot;
}

namespace {

void check_workspace(const Session& s) {
  if (!s.workspace) return;
  if (!s.selection) fail(ErrorCode::validation, "workspace without a selection");
  auto report = validate_perspective(*s.workspace, *s.selection);
  report.merge(check_structure(*s.workspace));
  if (!report.ok()) fail(ErrorCode::validation, "workspace is invalid: " + report.summary());
}

const SelectionContext& need_selection(const Session& s) {
  if (!s.selection) fail(ErrorCode::validation, "no papers selected yet");
  return *s.selection;
}

const Perspective& need_workspace(const Session& s) {
  if (!s.workspace) fail(ErrorCode::validation, "workspace is empty");
  return *s.workspace;
}

}  // namespace

template <class F>
auto NarrativeService::mutate(const std::string& id, F&& f) {
  std::lock_guard lk(guard(id));
  Session s = store_.load(id);
  auto result = f(s);
  check_workspace(s);
  store_.persist(s);
  return result;
}

Session NarrativeService::create_session() { return store_.create(); }

Session NarrativeService::get_session(const std::string& id) { return store_.load(id); }

Session NarrativeService::put_corpus(const std::string& id, const json& body) {
  if (!store_.exists(id)) fail(ErrorCode::not_found, "unknown session '" + id + "'");
  Corpus corpus;
  std::string origin = "file";
  if (body.is_object() && body.contains("scholar_url")) {
    if (!fetcher_) fail(ErrorCode::unsupported, "this service has no profile fetcher configured");
    corpus = fetch_scholar_profile(body.at("scholar_url").get<std::string>(), *fetcher_);
    origin = "scholar";
  } else {
    corpus = parse_corpus_file(body.dump());
  }
  return mutate(id, [&](Session& s) {
    s.corpus = corpus;
    s.selection.reset();
    s.candidate_sets.clear();
    s.workspace.reset();
    s.drafts.clear();
    s.log("corpus", {{"source", origin}, {"papers", corpus.papers.size()}, {"warnings", corpus.warnings}},
          store_.now());
    return s;
  });
}

Categorization NarrativeService::categorize(const std::string& id, const std::string& intent) {
  const auto s = store_.load(id);
  if (!s.corpus) fail(ErrorCode::validation, "no corpus loaded");
  Categorization result;
  try {
    result = precategorize(*s.corpus, intent, llm_, embeddings_);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::categorization) throw;
    result.tags = {single_tag_fallback(*s.corpus)};
    result.warnings.push_back(std::string("categorization failed, using one tag: ") + e.what());
  }
  mutate(id, [&](Session& fresh) {
    fresh.log("categorize", {{"tags", result.tags.size()}}, store_.now());
    return 0;
  });
  return result;
}

SelectionContext NarrativeService::select(const std::string& id, const std::vector<std::string>& ids,
                                          const std::string& focus, const std::string& intent) {
  return mutate(id, [&](Session& s) {
    if (!s.corpus) fail(ErrorCode::validation, "no corpus loaded");
    auto ctx = build_selection_context(*s.corpus, ids, focus, intent);
    s.selection = ctx;
    s.candidate_sets.clear();
    s.workspace.reset();
    s.drafts.clear();
    s.log("selection", {{"ids", ctx.ids()}, {"focus", focus}, {"intent", intent}}, store_.now());
    return ctx;
  });
}

CandidateSet NarrativeService::generate(const std::string& id, FrameworkKind framework) {
  SelectionContext ctx;
  {
    std::lock_guard lk(guard(id));
    ctx = need_selection(store_.load(id));
  }
  auto set = generate_candidates(ctx, framework, llm_, scorer_, config_.topdown);
  const auto before = json(ctx);
  return mutate(id, [&](Session& s) {
    if (!s.selection || json(*s.selection) != before)
      fail(ErrorCode::conflict, "selection changed while candidates were being generated");
    s.candidate_sets[framework] = set;
    s.log("generate", {{"framework", to_string(framework)}, {"candidates", set.candidates.size()},
                       {"survivors", set.survivors}},
          store_.now());
    return set;
  });
}

Perspective NarrativeService::set_workspace(const std::string& id, const json& body) {
  return mutate(id, [&](Session& s) {
    need_selection(s);
    Perspective p;
    if (body.contains("perspective")) {
      p = body["perspective"].get<Perspective>();
    } else if (body.contains("framework")) {
      const auto kind = framework_from_string(body["framework"].get<std::string>());
      const auto index = body.value("index", std::size_t{0});
      auto it = s.candidate_sets.find(kind);
      if (it == s.candidate_sets.end() || index >= it->second.candidates.size())
        fail(ErrorCode::not_found, "no candidate " + std::to_string(index) + " for " + std::string(to_string(kind)));
      p = it->second.candidates[index].perspective;
    } else {
      fail(ErrorCode::validation, "expected 'perspective' or 'framework' in the request body");
    }
    s.workspace = p;
    check_workspace(s);
    s.drafts.clear();
    s.log("workspace", {{"fingerprint", perspective_fingerprint(p)}}, store_.now());
    return p;
  });
}

Perspective NarrativeService::set_lock(const std::string& id, const FieldKey& key, bool locked) {
  return mutate(id, [&](Session& s) {
    s.workspace = narrativeforge::set_lock(need_workspace(s), key, locked);
    s.log("lock", {{"key", key.str()}, {"locked", locked}}, store_.now());
    return *s.workspace;
  });
}

Perspective NarrativeService::edit_workspace(const std::string& id, const json& body) {
  return mutate(id, [&](Session& s) {
    const auto& ctx = need_selection(s);
    const auto& p = need_workspace(s);
    if (body.contains("assignments")) {
      std::map<std::size_t, std::vector<std::string>> lists;
      for (const auto& [k, v] : body["assignments"].items()) {
        std::size_t idx = 0;
        try {
          idx = std::stoul(k);
        } catch (const std::exception&) {
          fail(ErrorCode::validation, "assignment index '" + k + "' is not a number");
        }
        lists[idx] = v.get<std::vector<std::string>>();
      }
      s.workspace = apply_assignment_edit(p, lists, ctx);
      s.log("edit", {{"assignments", body["assignments"]}}, store_.now());
    } else {
      const auto key = FieldKey::parse(body.at("key").get<std::string>());
      const auto& v = body.at("value");
      PartialValue value = v.is_array() ? PartialValue(v.get<std::vector<std::string>>())
                                        : PartialValue(v.get<std::string>());
      s.workspace = apply_partial_value(p, key, value, ctx);
      s.log("edit", {{"key", key.str()}}, store_.now());
    }
    return *s.workspace;
  });
}

Perspective NarrativeService::update_workspace(const std::string& id, const FieldKey& key) {
  Perspective p;
  SelectionContext ctx;
  {
    std::lock_guard lk(guard(id));
    const auto s = store_.load(id);
    ctx = need_selection(s);
    p = need_workspace(s);
  }
  auto outcome = request_partial_update(p, key, ctx, llm_, config_.update);
  const auto fingerprint = perspective_fingerprint(p);
  return mutate(id, [&](Session& s) {
    if (!s.workspace || perspective_fingerprint(*s.workspace) != fingerprint)
      fail(ErrorCode::conflict, "workspace changed while the update was running");
    s.workspace = outcome.perspective;
    s.log("update", {{"key", key.str()}, {"attempts", outcome.attempts}, {"no_op", outcome.no_op}}, store_.now());
    return *s.workspace;
  });
}

Perspective NarrativeService::revert_workspace(const std::string& id, std::size_t seq) {
  return mutate(id, [&](Session& s) {
    if (seq == 0 || seq > s.event_log.size()) fail(ErrorCode::not_found, "no event " + std::to_string(seq));
    const auto& snapshot = s.event_log[seq - 1].workspace;
    if (!snapshot) fail(ErrorCode::validation, "event " + std::to_string(seq) + " has no workspace");
    s.workspace = *snapshot;
    s.log("revert", {{"seq", seq}}, store_.now());
    return *s.workspace;
  });
}

ScoreReport NarrativeService::rescore(const std::string& id) {
  Perspective p;
  SelectionContext ctx;
  {
    std::lock_guard lk(guard(id));
    const auto s = store_.load(id);
    ctx = need_selection(s);
    p = need_workspace(s);
  }
  auto report = scorer_.score(p, ctx);
  mutate(id, [&](Session& s) {
    s.log("rescore", {{"fingerprint", perspective_fingerprint(p)}, {"final", report.final}}, store_.now());
    return 0;
  });
  return report;
}

RationaleDraft NarrativeService::rationale(const std::string& id, const std::string& strategy) {
  const auto& s_def = find_strategy(strategy);
  Perspective p;
  SelectionContext ctx;
  {
    std::lock_guard lk(guard(id));
    const auto s = store_.load(id);
    ctx = need_selection(s);
    p = need_workspace(s);
  }
  auto draft = generate_rationale(p, s_def, ctx, llm_, config_.rationale);
  return mutate(id, [&](Session& s) {
    if (!s.workspace || perspective_fingerprint(*s.workspace) != draft.perspective_ref)
      fail(ErrorCode::conflict, "workspace changed while the rationale was being drafted");
    s.drafts.push_back(draft);
    s.log("rationale", {{"strategy", draft.strategy.name}}, store_.now());
    return draft;
  });
}

std::vector<Slide> NarrativeService::confirm(const std::string& id) {
  return mutate(id, [&](Session& s) {
    const auto& ctx = need_selection(s);
    std::vector<Slide> slides{deck_from_perspective(need_workspace(s), ctx)};
    for (const auto& d : s.drafts) slides.push_back(rationale_slide(d));
    s.confirmed.push_back(ConfirmedEntry{*s.workspace, s.drafts});
    s.drafts.clear();
    s.deck = build_deck(s);
    s.log("confirm", {{"confirmed", s.confirmed.size()}, {"slides", slides.size()}}, store_.now());
    return slides;
  });
}

DeckSpec NarrativeService::deck(const std::string& id) {
  const auto s = store_.load(id);
  if (!s.deck) fail(ErrorCode::not_found, "nothing has been confirmed in session '" + id + "'");
  return *s.deck;
}

json problem_json(ErrorCode code, const std::string& detail) {
  return json{{"type", "about:blank"},
              {"title", std::string(to_string(code))},
              {"status", http_status(code)},
              {"code", std::string(to_string(code))},
              {"detail", detail}};
}

}  // namespace narrativeforge
