#include "narrativeforge/schema.hpp"

#include <regex>

#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;

FieldKey FieldKey::parse(std::string_view s) {
  if (s == "contribution_statement") return statement();
  static const std::regex key_re(R"(^(cluster_theme|papers_assign|paper_assign)(\d{1,6})$)");
  std::match_results<std::string_view::const_iterator> m;
  if (!std::regex_match(s.begin(), s.end(), m, key_re))
    fail(ErrorCode::validation, "unknown field key '" + std::string(s) + "'");
  const auto index = static_cast<std::size_t>(std::stoul(m[2].str()));
  return m[1].str() == "cluster_theme" ? theme(index) : assignment(index);
}

std::string FieldKey::str() const {
  switch (family) {
    case FieldFamily::contribution_statement: return "contribution_statement";
    case FieldFamily::cluster_theme: return "cluster_theme" + std::to_string(index);
    case FieldFamily::papers_assign: return "papers_assign" + std::to_string(index);
  }
  return {};
}

bool Perspective::has_field(const FieldKey& k) const {
  return k.family == FieldFamily::contribution_statement || k.index < clusters.size();
}

std::size_t Perspective::paper_count() const {
  std::size_t n = 0;
  for (const auto& c : clusters) n += c.papers_assign.size();
  return n;
}

PartialValue field_value(const Perspective& p, const FieldKey& key) {
  if (!p.has_field(key)) fail(ErrorCode::validation, "unknown field key '" + key.str() + "'");
  switch (key.family) {
    case FieldFamily::contribution_statement: return p.contribution_statement;
    case FieldFamily::cluster_theme: return p.clusters[key.index].cluster_theme;
    case FieldFamily::papers_assign: return p.clusters[key.index].papers_assign;
  }
  return std::string{};
}

void to_json(json& j, const Cluster& c) {
  j = json{{"cluster_theme", c.cluster_theme},
           {"cluster_description", c.cluster_description},
           {"papers_assign", c.papers_assign}};
}

void from_json(const json& j, Cluster& c) {
  c.cluster_theme = j.at("cluster_theme").get<std::string>();
  c.cluster_description = j.value("cluster_description", std::string{});
  const auto& assign = j.contains("papers_assign") ? j.at("papers_assign") : j.at("paper_assign");
  c.papers_assign = assign.get<std::vector<std::string>>();
}

namespace {

Pole pole_from_json(const json& j) {
  const auto s = j.get<std::string>();
  if (s == "a") return Pole::a;
  if (s == "b") return Pole::b;
  fail(ErrorCode::validation, "quadrant side must be \"a\" or \"b\", got '" + s + "'");
}

}  // namespace

void to_json(json& j, const AxisPair& a) {
  json quadrants = json::object();
  for (const auto& [idx, q] : a.quadrant_of) {
    quadrants[std::to_string(idx)] = json::array({q.side1 == Pole::a ? "a" : "b", q.side2 == Pole::a ? "a" : "b"});
  }
  j = json{{"axis1", {{"pole_a", a.axis1.pole_a}, {"pole_b", a.axis1.pole_b}}},
           {"axis2", {{"pole_a", a.axis2.pole_a}, {"pole_b", a.axis2.pole_b}}},
           {"quadrant_of", quadrants}};
}

void from_json(const json& j, AxisPair& a) {
  a.axis1 = {j.at("axis1").at("pole_a").get<std::string>(), j.at("axis1").at("pole_b").get<std::string>()};
  a.axis2 = {j.at("axis2").at("pole_a").get<std::string>(), j.at("axis2").at("pole_b").get<std::string>()};
  a.quadrant_of.clear();
  if (j.contains("quadrant_of")) {
    for (const auto& [key, value] : j.at("quadrant_of").items()) {
      std::size_t idx = 0;
      try {
        idx = static_cast<std::size_t>(std::stoul(key));
      } catch (const std::exception&) {
        fail(ErrorCode::validation, "quadrant_of key '" + key + "' is not a cluster index");
      }
      if (!value.is_array() || value.size() != 2)
        fail(ErrorCode::validation, "quadrant for cluster " + key + " must be a pair of sides");
      a.quadrant_of[idx] = Quadrant{pole_from_json(value[0]), pole_from_json(value[1])};
    }
  }
}

void to_json(json& j, const Perspective& p) {
  std::vector<std::string> locks;
  for (const auto& k : p.locks) locks.push_back(k.str());
  j = json{{"contribution_statement", p.contribution_statement},
           {"contribution_statement_description", p.contribution_statement_description},
           {"clusters", p.clusters},
           {"framework", to_string(p.framework)},
           {"locks", locks}};
  if (p.axes) j["axes"] = *p.axes;
}

void from_json(const json& j, Perspective& p) {
  p.contribution_statement = j.at("contribution_statement").get<std::string>();
  p.contribution_statement_description = j.value("contribution_statement_description", std::string{});
  p.clusters = j.at("clusters").get<std::vector<Cluster>>();
  p.framework = framework_from_string(j.value("framework", std::string("parallel")));
  p.axes.reset();
  if (j.contains("axes") && !j["axes"].is_null()) p.axes = j["axes"].get<AxisPair>();
  p.locks.clear();
  if (j.contains("locks"))
    for (const auto& k : j["locks"]) p.locks.insert(FieldKey::parse(k.get<std::string>()));
}

std::string perspective_fingerprint(const Perspective& p) {
  return text::hex64(text::fnv1a64(json(p).dump()));
}

ValidationReport validate_perspective(const Perspective& p, const SelectionContext& ctx) {
  ValidationReport report;
  if (text::trim(p.contribution_statement).empty())
    report.add(ViolationKind::empty_statement, "empty contribution statement");

  const auto& range = framework_spec(p.framework).cluster_range;
  if (p.clusters.size() < range.min || p.clusters.size() > range.max) {
    report.add(ViolationKind::cluster_count, "cluster count " + std::to_string(p.clusters.size()) +
                                                 " outside [" + std::to_string(range.min) + ", " +
                                                 std::to_string(range.max) + "]");
  }

  std::map<std::string, std::size_t> owner;
  std::set<std::string> reported_double;
  for (std::size_t i = 0; i < p.clusters.size(); ++i) {
    const auto& c = p.clusters[i];
    if (text::trim(c.cluster_theme).empty())
      report.add(ViolationKind::empty_theme, "empty theme: cluster " + std::to_string(i));
    if (c.papers_assign.empty())
      report.add(ViolationKind::empty_cluster, "empty cluster: cluster " + std::to_string(i));
    std::set<std::string> local;
    for (const auto& id : c.papers_assign) {
      if (!local.insert(id).second) {
        report.add(ViolationKind::duplicate_in_cluster,
                   "duplicate id within cluster " + std::to_string(i) + ": " + id);
        continue;
      }
      if (!ctx.find(id)) {
        report.add(ViolationKind::unknown_id, "unknown id: " + id);
        continue;
      }
      auto [it, inserted] = owner.emplace(id, i);
      if (!inserted && reported_double.insert(id).second)
        report.add(ViolationKind::doubly_assigned, "doubly-assigned: " + id);
    }
  }
  for (const auto& paper : ctx.selected) {
    if (!owner.count(paper.id)) report.add(ViolationKind::uncovered_paper, "uncovered: " + paper.id);
  }

  if (p.framework == FrameworkKind::coordinate && !p.axes)
    report.add(ViolationKind::axes_required, "axes required");
  if (p.framework != FrameworkKind::coordinate && p.axes)
    report.add(ViolationKind::axes_forbidden,
               "axes not allowed for the " + std::string(to_string(p.framework)) + " framework");

  for (const auto& k : p.locks) {
    if (!p.has_field(k)) report.add(ViolationKind::stale_lock, "lock refers to missing field: " + k.str());
  }
  return report;
}

Perspective set_lock(const Perspective& p, const FieldKey& key, bool locked) {
  if (!p.has_field(key)) fail(ErrorCode::validation, "unknown field key '" + key.str() + "'");
  Perspective out = p;
  if (locked)
    out.locks.insert(key);
  else
    out.locks.erase(key);
  return out;
}

UpdatePayload flatten_for_update(const Perspective& p, const FieldKey& key_to_modify) {
  if (!p.has_field(key_to_modify))
    fail(ErrorCode::validation, "unknown field key '" + key_to_modify.str() + "'");
  UpdatePayload payload{nlohmann::ordered_json::object(), key_to_modify};
  payload.fields["contribution_statement"] = p.contribution_statement;
  for (std::size_t i = 0; i < p.clusters.size(); ++i) {
    payload.fields["cluster_theme" + std::to_string(i)] = p.clusters[i].cluster_theme;
    payload.fields["papers_assign" + std::to_string(i)] = p.clusters[i].papers_assign;
  }
  if (p.axes) payload.fields["axes"] = nlohmann::ordered_json::parse(json(*p.axes).dump());
  payload.fields["key_to_modify"] = key_to_modify.str();
  return payload;
}

Perspective unflatten_update(const UpdatePayload& payload, FrameworkKind framework) {
  const auto& f = payload.fields;
  Perspective p;
  p.framework = framework;
  p.contribution_statement = f.at("contribution_statement").get<std::string>();
  for (std::size_t i = 0;; ++i) {
    const auto theme_key = "cluster_theme" + std::to_string(i);
    if (!f.contains(theme_key)) break;
    Cluster c;
    c.cluster_theme = f.at(theme_key).get<std::string>();
    c.papers_assign = f.at("papers_assign" + std::to_string(i)).get<std::vector<std::string>>();
    p.clusters.push_back(std::move(c));
  }
  if (f.contains("axes")) p.axes = json::parse(f.at("axes").dump()).get<AxisPair>();
  return p;
}

namespace {

void require_unlocked(const Perspective& p, const FieldKey& key) {
  if (!p.has_field(key)) fail(ErrorCode::validation, "unknown field key '" + key.str() + "'");
  if (p.is_locked(key)) fail(ErrorCode::lock_violation, "field '" + key.str() + "' is locked");
}

void require_partition(const Perspective& candidate, const SelectionContext& ctx) {
  auto report = validate_perspective(candidate, ctx);
  if (!report.ok()) fail(ErrorCode::validation, "assignment rejected: " + report.summary());
}

}  // namespace

Perspective apply_partial_value(const Perspective& p, const FieldKey& key, const PartialValue& value,
                                const SelectionContext& ctx) {
  require_unlocked(p, key);
  Perspective out = p;
  if (key.is_text()) {
    const auto* s = std::get_if<std::string>(&value);
    if (!s) fail(ErrorCode::validation, "field '" + key.str() + "' takes text, got an id list");
    auto v = text::trim(*s);
    if (v.empty()) fail(ErrorCode::validation, "field '" + key.str() + "' must not be empty");
    if (key.family == FieldFamily::contribution_statement)
      out.contribution_statement = std::move(v);
    else
      out.clusters[key.index].cluster_theme = std::move(v);
    return out;
  }
  const auto* ids = std::get_if<std::vector<std::string>>(&value);
  if (!ids) fail(ErrorCode::validation, "field '" + key.str() + "' takes an id list, got text");
  out.clusters[key.index].papers_assign = *ids;
  require_partition(out, ctx);
  return out;
}

Perspective apply_assignment_edit(const Perspective& p,
                                  const std::map<std::size_t, std::vector<std::string>>& lists,
                                  const SelectionContext& ctx) {
  Perspective out = p;
  for (const auto& [idx, ids] : lists) {
    const auto key = FieldKey::assignment(idx);
    require_unlocked(p, key);
    out.clusters[idx].papers_assign = ids;
  }
  require_partition(out, ctx);
  return out;
}

}  // namespace narrativeforge
