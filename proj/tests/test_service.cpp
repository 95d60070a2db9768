#include <doctest.h>
#include <httplib.h>

#include <thread>

#include "narrativeforge/embedding.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/fsio.hpp"
#include "narrativeforge/llm.hpp"
#include "narrativeforge/service.hpp"
#include "support.hpp"

using namespace narrativeforge;
using nlohmann::json;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::storage;
}

std::vector<std::string> corpus_ids() {
  std::vector<std::string> ids;
  for (int i = 1; i <= 12; ++i) ids.push_back((i < 10 ? "c0" : "c") + std::to_string(i));
  return ids;
}

struct Fixture {
  explicit Fixture(const std::string& tag)
      : store(nf_test::temp_dir(tag), counter_ids(), [] { return std::string("2026-01-01T00:00:00Z"); }),
        llm(nf_test::fixture_dir() / "mock_llm"),
        svc(store, llm, emb) {}

  static SessionStore::IdSource counter_ids() {
    auto n = std::make_shared<int>(0);
    return [n] { return "sess" + std::to_string(++*n); };
  }

  // Session with corpus_12 loaded, everything selected and the top linear spark in the workspace.
  std::string ready_session() {
    const auto id = svc.create_session().id;
    svc.put_corpus(id, json::parse(nf_test::read_fixture("corpus_12.json")));
    svc.select(id, corpus_ids(), "Human-centred interactive systems", "Prepare a job talk");
    svc.generate(id, FrameworkKind::linear);
    svc.set_workspace(id, {{"framework", "linear"}, {"index", 0}});
    return id;
  }

  SessionStore store;
  MockLlm llm;
  StubEmbedding emb;
  NarrativeService svc;
};

// Changes the session's workspace from inside the LLM call, so the service
// must notice the conflict when it tries to commit.
class MeddlingLlm : public LlmClient {
 public:
  MeddlingLlm(LlmClient& inner, std::function<void()> meddle) : inner_(inner), meddle_(std::move(meddle)) {}
  std::string complete(const std::string& prompt, const LlmParams& params) override {
    if (meddle_) std::exchange(meddle_, nullptr)();
    return inner_.complete(prompt, params);
  }

 private:
  LlmClient& inner_;
  std::function<void()> meddle_;
};

}  // namespace

TEST_CASE("session workflow end to end") {
  Fixture f("svc_flow");
  const auto id = f.ready_session();
  auto s = f.svc.get_session(id);
  REQUIRE(s.workspace);
  CHECK(s.candidate_sets.at(FrameworkKind::linear).candidates.size() == 4);
  CHECK(*s.workspace == s.candidate_sets.at(FrameworkKind::linear).candidates[0].perspective);

  const auto updated = f.svc.update_workspace(id, FieldKey::theme(0));
  CHECK(updated.clusters[0].cluster_theme == "Immersive touch rendering techniques");

  const auto report = f.svc.rescore(id);
  CHECK(report.final > 0.0);

  const auto draft = f.svc.rationale(id, strategy_catalog().front().name);
  CHECK(draft.perspective_ref == perspective_fingerprint(updated));
  CHECK(code_of([&] { f.svc.rationale(id, "No such strategy"); }) == ErrorCode::not_found);

  const auto slides = f.svc.confirm(id);
  CHECK(slides.size() == 2);
  const auto deck = f.svc.deck(id);
  CHECK(deck.slides.size() == 3);  // title, perspective, rationale
  CHECK(deck.slides[0].layout == SlideLayout::title);

  // Confirmed entries are copies: later edits do not reach them.
  f.svc.edit_workspace(id, {{"key", "contribution_statement"}, {"value", "A different story"}});
  s = f.svc.get_session(id);
  CHECK(s.confirmed.at(0).perspective == updated);
  CHECK(s.confirmed.at(0).rationales.size() == 1);
  CHECK(s.drafts.empty());
}

TEST_CASE("persistence round trip is byte-stable") {
  Fixture f("svc_persist");
  const auto id = f.ready_session();
  f.svc.confirm(id);
  const auto bytes = f.store.load_bytes(id);
  const auto s = f.store.load(id);
  f.store.persist(s);
  CHECK(f.store.load_bytes(id) == bytes);
  CHECK(json(s).dump() == json(json::parse(bytes).get<Session>()).dump());
  CHECK(f.store.latest() == id);
  CHECK(f.store.list() == std::vector<std::string>{id});
  CHECK(code_of([&] { f.store.load("missing"); }) == ErrorCode::not_found);
  CHECK(code_of([&] { f.store.load("../etc/passwd"); }) == ErrorCode::not_found);
}

TEST_CASE("a crash before the rename leaves the previous version") {
  Fixture f("svc_crash");
  const auto id = f.ready_session();
  const auto before = f.store.load_bytes(id);
  f.store.before_rename = [](const std::filesystem::path&) { throw std::runtime_error("power cut"); };
  CHECK_THROWS(f.svc.set_lock(id, FieldKey::theme(0), true));
  f.store.before_rename = nullptr;
  CHECK(f.store.load_bytes(id) == before);
  CHECK_FALSE(f.store.load(id).workspace->is_locked(FieldKey::theme(0)));

  // A torn file is reported, not silently replaced.
  write_file_atomic((f.store.dir() / (id + ".json")).string(), before.substr(0, before.size() / 2));
  CHECK(code_of([&] { f.store.load(id); }) == ErrorCode::storage);
}

TEST_CASE("event log survives a hundred mutations in order") {
  Fixture f("svc_events");
  const auto id = f.ready_session();
  const auto base = f.svc.get_session(id).event_log.size();
  for (int i = 0; i < 100; ++i) f.svc.set_lock(id, FieldKey::theme(i % 3), i % 2 == 0);
  const auto s = f.store.load(id);
  REQUIRE(s.event_log.size() == base + 100);
  for (std::size_t i = 0; i < s.event_log.size(); ++i) CHECK(s.event_log[i].seq == i + 1);
  CHECK(s.event_log.back().action == "lock");
}

TEST_CASE("concurrent mutations are serialized without lost events") {
  Fixture f("svc_threads");
  const auto id = f.ready_session();
  const auto base = f.svc.get_session(id).event_log.size();
  std::vector<std::thread> threads;
  for (int t = 0; t < 6; ++t)
    threads.emplace_back([&, t] {
      for (int i = 0; i < 10; ++i) f.svc.set_lock(id, FieldKey::theme(t % 3), i % 2 == 0);
    });
  for (auto& th : threads) th.join();
  const auto s = f.store.load(id);
  CHECK(s.event_log.size() == base + 60);
  for (std::size_t i = 0; i < s.event_log.size(); ++i) CHECK(s.event_log[i].seq == i + 1);
}

TEST_CASE("edits made during an LLM call are detected") {
  Fixture f("svc_conflict");
  const auto id = f.ready_session();
  MeddlingLlm meddling(f.llm, [&] { f.svc.set_lock(id, FieldKey::theme(2), true); });
  NarrativeService racy(f.store, meddling, f.emb);
  CHECK(code_of([&] { racy.update_workspace(id, FieldKey::theme(0)); }) == ErrorCode::conflict);
  const auto s = f.store.load(id);
  CHECK(s.workspace->is_locked(FieldKey::theme(2)));
  CHECK(s.workspace->clusters[0].cluster_theme != "Immersive touch rendering techniques");
}

TEST_CASE("workspace API surface") {
  Fixture f("svc_ui");
  const auto id = f.ready_session();
  auto ws = f.svc.get_session(id).workspace.value();

  SUBCASE("locks are reflected and enforced") {
    f.svc.set_lock(id, FieldKey::statement(), true);
    CHECK(f.svc.get_session(id).workspace->is_locked(FieldKey::statement()));
    CHECK(code_of([&] { f.svc.update_workspace(id, FieldKey::statement()); }) == ErrorCode::lock_violation);
    CHECK(code_of([&] { f.svc.edit_workspace(id, {{"key", "contribution_statement"}, {"value", "x"}}); }) ==
          ErrorCode::lock_violation);
  }
  SUBCASE("moving a paper is one mutation") {
    auto from = ws.clusters[0].papers_assign, to = ws.clusters[1].papers_assign;
    to.push_back(from.back());
    from.pop_back();
    const auto before = f.svc.get_session(id).event_log.size();
    const auto after = f.svc.edit_workspace(id, {{"assignments", {{"0", from}, {"1", to}}}});
    CHECK(after.clusters[1].papers_assign == to);
    CHECK(f.svc.get_session(id).event_log.size() == before + 1);
    // A partial move that breaks the partition is refused and nothing is logged.
    const auto original = ws.clusters[0].papers_assign;
    CHECK(code_of([&] { f.svc.edit_workspace(id, {{"assignments", {{"0", original}}}}); }) == ErrorCode::validation);
    CHECK(f.svc.get_session(id).event_log.size() == before + 1);
  }
  SUBCASE("revert restores an earlier snapshot") {
    const auto seq = f.svc.get_session(id).event_log.back().seq;
    f.svc.edit_workspace(id, {{"key", "cluster_theme1"}, {"value", "Changed"}});
    CHECK(f.svc.revert_workspace(id, seq) == ws);
    CHECK(code_of([&] { f.svc.revert_workspace(id, 9999); }) == ErrorCode::not_found);
    CHECK(code_of([&] { f.svc.revert_workspace(id, 1); }) == ErrorCode::validation);
  }
  SUBCASE("picking a spark out of range") {
    CHECK(code_of([&] { f.svc.set_workspace(id, {{"framework", "linear"}, {"index", 7}}); }) ==
          ErrorCode::not_found);
    CHECK(code_of([&] { f.svc.set_workspace(id, json::object()); }) == ErrorCode::validation);
  }
}

TEST_CASE("service input errors") {
  Fixture f("svc_errors");
  const auto id = f.svc.create_session().id;
  CHECK(code_of([&] { f.svc.put_corpus(id, {{"scholar_url", "https://example.org"}}); }) == ErrorCode::unsupported);
  CHECK(code_of([&] { f.svc.put_corpus("nope", json::parse(nf_test::read_fixture("corpus_12.json"))); }) ==
        ErrorCode::not_found);
  CHECK(code_of([&] { f.svc.generate(id, FrameworkKind::linear); }) == ErrorCode::validation);
  CHECK(code_of([&] { f.svc.confirm(id); }) == ErrorCode::validation);
  CHECK(code_of([&] { f.svc.deck(id); }) == ErrorCode::not_found);

  f.svc.put_corpus(id, json::parse(nf_test::read_fixture("corpus_12.json")));
  CHECK(f.svc.categorize(id, "find haptics").tags.size() == 3);

  ScriptedLlm garbage({"no"});
  NarrativeService fallback(f.store, garbage, f.emb);
  const auto c = fallback.categorize(id, "x");
  REQUIRE(c.tags.size() == 1);
  CHECK(c.tags[0].paper_ids.size() == 12);
  CHECK_FALSE(c.warnings.empty());
}

TEST_CASE("HTTP routes") {
  Fixture f("svc_http");
  httplib::Server server;
  install_routes(server, f.svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto post = [&](const std::string& path, const json& body) {
    return cli.Post(path, body.dump(), "application/json");
  };

  auto res = cli.Get("/frameworks");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body).size() == 4);
  CHECK(json::parse(cli.Get("/strategies")->body).size() == 11);

  res = cli.Post("/sessions", "", "application/json");
  REQUIRE(res);
  CHECK(res->status == 201);
  const auto id = json::parse(res->body).at("id").get<std::string>();
  const auto base = "/sessions/" + id;

  res = cli.Put(base + "/corpus", nf_test::read_fixture("corpus_12.json"), "application/json");
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["papers"] == 12);

  CHECK(post(base + "/categorize", {{"intent", "x"}})->status == 200);
  CHECK(post(base + "/selection", {{"ids", corpus_ids()}, {"focus", "HCI"}, {"intent", "talk"}})->status == 200);

  res = cli.Post(base + "/generate?framework=linear", "", "application/json");
  REQUIRE(res->status == 200);
  CHECK(json::parse(res->body)["candidates"].size() == 4);

  res = cli.Post(base + "/generate?framework=spiral", "", "application/json");
  CHECK(res->status == 400);
  CHECK(res->get_header_value("Content-Type") == "application/problem+json");
  CHECK(json::parse(res->body)["code"] == "validation_error");

  CHECK(post(base + "/workspace", {{"framework", "linear"}, {"index", 1}})->status == 200);
  res = post(base + "/workspace/lock", {{"key", "cluster_theme0"}, {"locked", true}});
  CHECK(json::parse(res->body)["locks"].size() == 1);

  res = post(base + "/workspace/update", {{"key_to_modify", "cluster_theme0"}});
  CHECK(res->status == 409);
  CHECK(json::parse(res->body)["code"] == "lock_violation");

  res = post(base + "/workspace/update", {{"key_to_modify", "cluster_theme1"}});
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["clusters"][1]["cluster_theme"] == "Immersive touch rendering techniques");

  CHECK(post(base + "/workspace/edit", {{"key", "cluster_theme2"}, {"value", "Manual"}})->status == 200);
  CHECK(cli.Post(base + "/workspace/rescore", "", "application/json")->status == 200);
  CHECK(post(base + "/rationale", {{"strategy", strategy_catalog().back().name}})->status == 200);
  CHECK(cli.Post(base + "/deck.json")->status == 404);  // wrong verb
  CHECK(cli.Get(base + "/deck.json")->status == 404);   // nothing confirmed yet
  CHECK(cli.Post(base + "/confirm", "", "application/json")->status == 200);

  res = cli.Get(base + "/deck.json");
  REQUIRE(res->status == 200);
  CHECK(json::parse(res->body)["slides"].size() == 3);
  res = cli.Get(base + "/deck.pptx");
  REQUIRE(res->status == 200);
  CHECK(nf_test::read_zip(res->body).count("ppt/slides/slide3.xml") == 1);

  const auto revert_to = json::parse(cli.Get(base)->body)["event_log"].size();
  CHECK(post(base + "/workspace/revert", {{"seq", revert_to}})->status == 200);
  CHECK(cli.Post(base + "/workspace/revert", "{oops", "application/json")->status == 400);
  CHECK(post(base + "/workspace/revert", json::object())->status == 400);

  CHECK(cli.Get("/sessions/unknown")->status == 404);
  res = cli.Get(base);
  CHECK(res->status == 200);
  CHECK(json::parse(res->body)["id"] == id);

  server.stop();
  loop.join();
}
