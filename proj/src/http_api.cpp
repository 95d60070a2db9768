#include <httplib.h>

#include "narrativeforge/error.hpp"
#include "narrativeforge/service.hpp"

namespace narrativeforge {

using nlohmann::json;

namespace {

constexpr const char* kJson = "application/json";
constexpr const char* kPptx = "application/vnd.openxmlformats-officedocument.presentationml.presentation";

void send_problem(httplib::Response& res, ErrorCode code, const std::string& detail) {
  res.status = http_status(code);
  res.set_content(problem_json(code, detail).dump(), "application/problem+json");
}

template <class F>
httplib::Server::Handler wrap(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const Error& e) {
      send_problem(res, e.code(), e.what());
    } catch (const json::exception& e) {
      send_problem(res, ErrorCode::validation, std::string("malformed request body: ") + e.what());
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(json{{"type", "about:blank"}, {"title", "internal"}, {"status", 500}, {"code", "internal"},
                           {"detail", e.what()}}
                          .dump(),
                      "application/problem+json");
    }
  };
}

json body_of(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::parse, "request body is not valid JSON");
  return j;
}

void send_json(httplib::Response& res, const json& j, int status = 200) {
  res.status = status;
  res.set_content(j.dump(), kJson);
}

std::string sid(const httplib::Request& req) { return req.matches[1].str(); }

}  // namespace

void install_routes(httplib::Server& server, NarrativeService& svc) {
  const std::string S = "/sessions/([A-Za-z0-9_-]+)";

  server.Get("/frameworks", wrap([](const httplib::Request&, httplib::Response& res) {
    json out = json::array();
    for (const auto& f : framework_catalog())
      out.push_back({{"kind", to_string(f.kind)},
                     {"display_name", f.display_name},
                     {"prevalence", {{"count", f.prevalence.count}, {"total", f.prevalence.total}}}});
    send_json(res, out);
  }));

  server.Get("/strategies", wrap([](const httplib::Request&, httplib::Response& res) {
    send_json(res, strategy_catalog());
  }));

  server.Post("/sessions", wrap([&svc](const httplib::Request&, httplib::Response& res) {
    send_json(res, {{"id", svc.create_session().id}}, 201);
  }));

  server.Get(S, wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    res.set_content(svc.store().load_bytes(sid(req)), kJson);
  }));

  server.Put(S + "/corpus", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto s = svc.put_corpus(sid(req), body_of(req));
    send_json(res, {{"papers", s.corpus->papers.size()}, {"warnings", s.corpus->warnings}});
  }));

  server.Post(S + "/categorize", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    const auto c = svc.categorize(sid(req), body.value("intent", std::string{}));
    send_json(res, {{"tags", c.tags}, {"warnings", c.warnings}});
  }));

  server.Post(S + "/selection", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    send_json(res, svc.select(sid(req), body.at("ids").get<std::vector<std::string>>(),
                              body.value("focus", std::string{}), body.value("intent", std::string{})));
  }));

  server.Post(S + "/generate", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    if (!req.has_param("framework")) fail(ErrorCode::validation, "missing ?framework=");
    send_json(res, svc.generate(sid(req), framework_from_string(req.get_param_value("framework"))));
  }));

  server.Post(S + "/workspace", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.set_workspace(sid(req), body_of(req)));
  }));

  server.Post(S + "/workspace/lock", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    send_json(res, svc.set_lock(sid(req), FieldKey::parse(body.at("key").get<std::string>()),
                                body.value("locked", true)));
  }));

  server.Post(S + "/workspace/edit", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.edit_workspace(sid(req), body_of(req)));
  }));

  server.Post(S + "/workspace/update", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    const auto body = body_of(req);
    send_json(res, svc.update_workspace(sid(req), FieldKey::parse(body.at("key_to_modify").get<std::string>())));
  }));

  server.Post(S + "/workspace/revert", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.revert_workspace(sid(req), body_of(req).at("seq").get<std::size_t>()));
  }));

  server.Post(S + "/workspace/rescore", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.rescore(sid(req)));
  }));

  server.Post(S + "/rationale", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, svc.rationale(sid(req), body_of(req).at("strategy").get<std::string>()));
  }));

  server.Post(S + "/confirm", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    send_json(res, {{"slides", svc.confirm(sid(req))}});
  }));

  server.Get(S + "/deck.json", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    res.set_content(export_deck_json(svc.deck(sid(req))), kJson);
  }));

  server.Get(S + "/deck.pptx", wrap([&svc](const httplib::Request& req, httplib::Response& res) {
    res.set_header("Content-Disposition", "attachment; filename=\"deck.pptx\"");
    res.set_content(export_pptx(svc.deck(sid(req))), kPptx);
  }));
}

}  // namespace narrativeforge
