#include "narrativeforge/cli.hpp"

#include <httplib.h>

#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <toml.hpp>

#include "narrativeforge/error.hpp"
#include "narrativeforge/fsio.hpp"
#include "narrativeforge/service.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Globals {
  std::string store;
  std::string mock_llm;
  bool stub_embeddings = false;
  std::optional<std::uint64_t> seed;
  std::string config;
  std::string session = "LATEST";
};

// Provider and server settings from narrativeforge.toml, then the environment.
struct Config {
  std::string store = ".narrativeforge";
  HttpLlmClient::Settings llm;
  HttpEmbeddingProvider::Settings embeddings;
  std::string host = "127.0.0.1";
  int port = 8080;
};

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

Config load_config(const std::string& explicit_path) {
  Config c;
  const std::string path = explicit_path.empty() ? "narrativeforge.toml" : explicit_path;
  if (fs::exists(path)) {
    toml::table t;
    try {
      t = toml::parse_file(path);
    } catch (const toml::parse_error& e) {
      fail(ErrorCode::usage, "bad config " + path + ": " + std::string(e.description()));
    }
    c.store = t["store"]["dir"].value_or(c.store);
    c.llm.base_url = t["llm"]["base_url"].value_or(c.llm.base_url);
    c.llm.path = t["llm"]["path"].value_or(c.llm.path);
    c.llm.model = t["llm"]["model"].value_or(c.llm.model);
    c.llm.timeout_seconds = t["llm"]["timeout_seconds"].value_or(c.llm.timeout_seconds);
    c.embeddings.base_url = t["embeddings"]["base_url"].value_or(c.embeddings.base_url);
    c.embeddings.path = t["embeddings"]["path"].value_or(c.embeddings.path);
    c.embeddings.model = t["embeddings"]["model"].value_or(c.embeddings.model);
    c.embeddings.dimension =
        static_cast<std::size_t>(t["embeddings"]["dimension"].value_or(static_cast<int64_t>(c.embeddings.dimension)));
    c.host = t["server"]["host"].value_or(c.host);
    c.port = t["server"]["port"].value_or(c.port);
  } else if (!explicit_path.empty()) {
    fail(ErrorCode::usage, "config file not found: " + explicit_path);
  }
  c.store = env_or("NARRATIVEFORGE_STORE", c.store);
  c.llm.base_url = env_or("NARRATIVEFORGE_LLM_URL", c.llm.base_url);
  c.llm.model = env_or("NARRATIVEFORGE_LLM_MODEL", c.llm.model);
  c.llm.api_key = env_or("NARRATIVEFORGE_API_KEY", env_or("OPENAI_API_KEY", ""));
  c.embeddings.base_url = env_or("NARRATIVEFORGE_EMBEDDINGS_URL", c.embeddings.base_url);
  c.embeddings.api_key = c.llm.api_key;
  if (const char* p = std::getenv("NARRATIVEFORGE_PORT")) c.port = std::atoi(p);
  return c;
}

struct Runtime {
  Config config;
  std::unique_ptr<LlmClient> llm;
  std::unique_ptr<EmbeddingProvider> embeddings;
  std::unique_ptr<SessionStore> store;
  std::unique_ptr<HttplibFetcher> fetcher;
  std::unique_ptr<NarrativeService> service;

  std::string resolve(const std::string& session) const {
    return session.empty() || session == "LATEST" ? store->latest() : session;
  }
};

std::unique_ptr<Runtime> make_runtime(const Globals& g) {
  auto rt = std::make_unique<Runtime>();
  rt->config = load_config(g.config);
  const auto store_dir = g.store.empty() ? rt->config.store : g.store;
  const auto seed = g.seed.value_or(0);

  if (!g.mock_llm.empty())
    rt->llm = std::make_unique<MockLlm>(fs::path(g.mock_llm));
  else
    rt->llm = std::make_unique<HttpLlmClient>(rt->config.llm);
  if (g.stub_embeddings)
    rt->embeddings = std::make_unique<StubEmbedding>(64, seed);
  else
    rt->embeddings = std::make_unique<HttpEmbeddingProvider>(rt->config.embeddings);

  // Seeded runs get reproducible ids and timestamps so their outputs diff cleanly.
  SessionStore::IdSource ids;
  SessionStore::Clock clock;
  if (g.seed) {
    const fs::path dir = store_dir;
    ids = [dir, seed] {
      std::size_t n = 0;
      if (fs::exists(dir))
        for (const auto& e : fs::directory_iterator(dir)) n += e.path().extension() == ".json";
      return "s" + text::hex64(text::fnv1a64("session:" + std::to_string(seed) + ":" + std::to_string(n)));
    };
    clock = [] { return std::string("1970-01-01T00:00:00Z"); };
  }
  rt->store = std::make_unique<SessionStore>(store_dir, ids, clock);
  rt->fetcher = std::make_unique<HttplibFetcher>();

  ServiceConfig sc;
  sc.scoring.seed = seed;
  if (g.seed) {
    sc.topdown.params.seed = seed;
    sc.update.params.seed = seed;
    sc.rationale.params.seed = seed;
  }
  rt->service = std::make_unique<NarrativeService>(*rt->store, *rt->llm, *rt->embeddings, rt->fetcher.get(), sc);
  return rt;
}

void emit(const json& j, const std::string& path, std::ostream& out) {
  const auto bytes = j.dump(2) + "\n";
  if (path.empty() || path == "-")
    out << bytes;
  else
    write_file_atomic(path, bytes);
}

json read_json_file(const std::string& path) {
  auto j = json::parse(read_file(path), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::parse, path + " is not valid JSON");
  return j;
}

Perspective read_perspective(const std::string& path) {
  auto j = read_json_file(path);
  // Accept a bare perspective or a ranked candidate wrapper.
  if (j.contains("perspective")) j = j["perspective"];
  return j.get<Perspective>();
}

SelectionContext session_selection(Runtime& rt, const std::string& id) {
  const auto s = rt.store->load(id);
  if (!s.selection) fail(ErrorCode::validation, "session " + id + " has no selection");
  return *s.selection;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"narrativeforge: research narrative generation pipeline", "narrativeforge"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  std::uint64_t seed_value = 0;
  app.add_option("--store", g.store, "Session store directory");
  app.add_option("--mock-llm", g.mock_llm, "Replay LLM responses from a fixture directory");
  app.add_flag("--stub-embeddings", g.stub_embeddings, "Use seeded hash embeddings");
  auto* seed_opt = app.add_option("--seed", seed_value, "Seed for embeddings, k-means and LLM sampling");
  app.add_option("--config", g.config, "Path to narrativeforge.toml");
  app.add_option("--session", g.session, "Session id (default: the most recent)");

  const std::vector<std::string> kinds{"parallel", "linear", "coordinate", "circular"};

  auto* ingest = app.add_subcommand("ingest", "Load a corpus into a new session and select papers");
  std::string corpus_path, scholar_url;
  std::string focus = "Research overview";
  std::string intent = "Present the selected work as one coherent research story";
  std::vector<std::string> ids;
  ingest->add_option("corpus", corpus_path, "Corpus JSON file");
  ingest->add_option("--scholar", scholar_url, "Scholar profile URL instead of a file");
  ingest->add_option("--ids", ids, "Paper ids to select (default: all)");
  ingest->add_option("--focus", focus, "Overall research focus")->capture_default_str();
  ingest->add_option("--intent", intent, "What the researcher wants to convey")->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Generate ranked candidate perspectives");
  std::string framework, out_path;
  std::size_t pick = 0;
  generate->add_option("--framework", framework, "Narrative framework")->required()->check(CLI::IsMember(kinds));
  generate->add_option("--out", out_path, "Write candidates here (default: stdout)");
  generate->add_option("--pick", pick, "Candidate loaded into the workspace");

  auto* update = app.add_subcommand("update", "Regenerate one unlocked field");
  std::string perspective_path, key;
  update->add_option("--perspective", perspective_path, "Perspective JSON (default: session workspace)");
  update->add_option("--key", key, "Field to regenerate, e.g. cluster_theme1")->required();
  update->add_option("--out", out_path, "Write the updated perspective here");

  auto* score = app.add_subcommand("score", "Score a perspective");
  score->add_option("--perspective", perspective_path, "Perspective JSON (default: session workspace)");
  score->add_option("--out", out_path, "Write the score report here");

  auto* rationale = app.add_subcommand("rationale", "Draft a rationale for the workspace");
  std::string strategy;
  rationale->add_option("--strategy", strategy, "Strategy name, e.g. \"Big Name's Quote\"")->required();

  auto* confirm = app.add_subcommand("confirm", "Confirm the workspace into the deck");

  auto* exporter = app.add_subcommand("export", "Write deck.json and deck.pptx");
  std::string pptx_path, deck_json_path;
  exporter->add_option("--pptx", pptx_path, "Output .pptx path")->required();
  exporter->add_option("--json", deck_json_path, "Output deck JSON path (default: deck.json next to the pptx)");

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  std::string host;
  int port = 0;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << problem_json(ErrorCode::usage, e.what()).dump() << "\n";
    return kExitUsage;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    auto rt = make_runtime(g);
    auto& svc = *rt->service;

    if (ingest->parsed()) {
      if (corpus_path.empty() == scholar_url.empty())
        fail(ErrorCode::usage, "ingest takes exactly one of <corpus> or --scholar");
      json body = scholar_url.empty() ? json::parse(serialize_corpus(parse_corpus_file(read_file(corpus_path))))
                                      : json{{"scholar_url", scholar_url}};
      const auto id = svc.create_session().id;
      const auto s = svc.put_corpus(id, body);
      if (ids.empty())
        for (const auto& p : s.corpus->papers) ids.push_back(p.id);
      svc.select(id, ids, focus, intent);
      emit({{"session", id}, {"papers", s.corpus->papers.size()}, {"selected", ids.size()},
            {"warnings", s.corpus->warnings}},
           "", out);
    } else if (generate->parsed()) {
      const auto id = rt->resolve(g.session);
      const auto set = svc.generate(id, framework_from_string(framework));
      if (pick < set.candidates.size()) svc.set_workspace(id, {{"framework", framework}, {"index", pick}});
      emit(set, out_path, out);
    } else if (update->parsed()) {
      const auto id = rt->resolve(g.session);
      const auto field = FieldKey::parse(key);
      if (perspective_path.empty()) {
        emit(svc.update_workspace(id, field), out_path, out);
      } else {
        const auto ctx = session_selection(*rt, id);
        ServiceConfig defaults;
        if (g.seed) defaults.update.params.seed = *g.seed;
        const auto outcome = request_partial_update(read_perspective(perspective_path), field, ctx, *rt->llm,
                                                    defaults.update);
        emit(outcome.perspective, out_path, out);
      }
    } else if (score->parsed()) {
      const auto id = rt->resolve(g.session);
      if (perspective_path.empty()) {
        emit(svc.rescore(id), out_path, out);
      } else {
        const auto p = read_perspective(perspective_path);
        const auto ctx = session_selection(*rt, id);
        auto report = validate_perspective(p, ctx);
        report.merge(check_structure(p));
        if (!report.ok()) fail(ErrorCode::validation, "perspective is invalid: " + report.summary());
        ScoringOptions opts;
        opts.seed = g.seed.value_or(0);
        emit(Scorer(*rt->embeddings, opts).score(p, ctx), out_path, out);
      }
    } else if (rationale->parsed()) {
      emit(svc.rationale(rt->resolve(g.session), strategy), "", out);
    } else if (confirm->parsed()) {
      emit({{"slides", svc.confirm(rt->resolve(g.session))}}, "", out);
    } else if (exporter->parsed()) {
      const auto id = rt->resolve(g.session);
      const auto s = rt->store->load(id);
      // Export confirms a workspace that has not been confirmed yet.
      if (s.workspace && (s.confirmed.empty() || !(s.confirmed.back().perspective == *s.workspace) || !s.drafts.empty()))
        svc.confirm(id);
      const auto deck = svc.deck(id);
      if (deck_json_path.empty()) deck_json_path = (fs::path(pptx_path).parent_path() / "deck.json").string();
      write_file_atomic(deck_json_path, export_deck_json(deck));
      write_file_atomic(pptx_path, export_pptx(deck));
      emit({{"session", id}, {"slides", deck.slides.size()}, {"deck_json", deck_json_path}, {"pptx", pptx_path}}, "",
           out);
    } else if (serve->parsed()) {
      httplib::Server server;
      install_routes(server, svc);
      const auto bind_host = host.empty() ? rt->config.host : host;
      const auto bind_port = port ? port : rt->config.port;
      err << "listening on " << bind_host << ":" << bind_port << "\n";
      if (!server.listen(bind_host, bind_port))
        fail(ErrorCode::storage, "cannot listen on " + bind_host + ":" + std::to_string(bind_port));
    }
  } catch (const Error& e) {
    err << problem_json(e.code(), e.what()).dump() << "\n";
    return e.code() == ErrorCode::usage ? kExitUsage : kExitPipeline;
  } catch (const json::exception& e) {
    err << problem_json(ErrorCode::parse, e.what()).dump() << "\n";
    return kExitPipeline;
  } catch (const std::exception& e) {
    err << problem_json(ErrorCode::storage, e.what()).dump() << "\n";
    return kExitPipeline;
  }
  return kExitOk;
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run_cli(args, std::cout, std::cerr);
}

}  // namespace narrativeforge
