#include "narrativeforge/deck.hpp"

#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

using nlohmann::json;

std::string_view to_string(SlideLayout layout) {
  switch (layout) {
    case SlideLayout::parallel_tree: return "parallel_tree";
    case SlideLayout::linear_chain: return "linear_chain";
    case SlideLayout::circular_ring: return "circular_ring";
    case SlideLayout::coordinate_plane: return "coordinate_plane";
    case SlideLayout::rationale_text: return "rationale_text";
    case SlideLayout::title: return "title";
  }
  return "";
}

SlideLayout slide_layout_from_string(std::string_view s) {
  for (auto l : {SlideLayout::parallel_tree, SlideLayout::linear_chain, SlideLayout::circular_ring,
                 SlideLayout::coordinate_plane, SlideLayout::rationale_text, SlideLayout::title})
    if (to_string(l) == s) return l;
  fail(ErrorCode::validation, "unknown slide layout '" + std::string(s) + "'");
}

SlideLayout layout_for(FrameworkKind kind) {
  switch (kind) {
    case FrameworkKind::parallel: return SlideLayout::parallel_tree;
    case FrameworkKind::linear: return SlideLayout::linear_chain;
    case FrameworkKind::coordinate: return SlideLayout::coordinate_plane;
    case FrameworkKind::circular: return SlideLayout::circular_ring;
  }
  return SlideLayout::parallel_tree;
}

std::optional<FrameworkKind> framework_for(SlideLayout layout) {
  switch (layout) {
    case SlideLayout::parallel_tree: return FrameworkKind::parallel;
    case SlideLayout::linear_chain: return FrameworkKind::linear;
    case SlideLayout::coordinate_plane: return FrameworkKind::coordinate;
    case SlideLayout::circular_ring: return FrameworkKind::circular;
    default: return std::nullopt;
  }
}

std::string roles::papers(std::size_t cluster) { return "papers" + std::to_string(cluster); }

const std::vector<std::string>& Slide::block(const std::string& role) const {
  static const std::vector<std::string> empty;
  auto it = text_blocks.find(role);
  return it == text_blocks.end() ? empty : it->second;
}

void to_json(json& j, const Slide& s) {
  json edges = json::array();
  for (const auto& [a, b] : s.edges) edges.push_back({a, b});
  j = json{{"layout", to_string(s.layout)},
           {"text_blocks", s.text_blocks},
           {"edges", std::move(edges)},
           {"script", s.script},
           {"visual", s.visual ? json(*s.visual) : json(nullptr)}};
}

void from_json(const json& j, Slide& s) {
  s.layout = slide_layout_from_string(j.at("layout").get<std::string>());
  s.text_blocks = j.at("text_blocks").get<std::map<std::string, std::vector<std::string>>>();
  s.edges.clear();
  for (const auto& e : j.value("edges", json::array())) {
    if (!e.is_array() || e.size() != 2) fail(ErrorCode::validation, "slide edge must be a pair");
    s.edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
  }
  s.script = j.value("script", std::string{});
  s.visual.reset();
  if (j.contains("visual") && !j["visual"].is_null()) s.visual = j["visual"].get<std::string>();
}

void to_json(json& j, const DeckSpec& d) {
  j = json{{"meta", {{"focus", d.meta.focus}, {"created_at", d.meta.created_at},
                     {"engine_version", d.meta.engine_version}}},
           {"slides", d.slides}};
}

void from_json(const json& j, DeckSpec& d) {
  const auto& m = j.at("meta");
  d.meta = DeckMeta{m.value("focus", std::string{}), m.value("created_at", std::string{}),
                    m.value("engine_version", std::string{})};
  d.slides = j.at("slides").get<std::vector<Slide>>();
}

std::string engine_version() { return "narrativeforge 0.1.0"; }

void check_slide(const Slide& s) {
  auto need = [&](const char* role, std::size_t n = 1) {
    const auto& b = s.block(role);
    if (b.size() < n) fail(ErrorCode::validation, std::string(to_string(s.layout)) + " slide needs block '" + role + "'");
    for (const auto& t : b)
      if (t.empty()) fail(ErrorCode::validation, std::string("empty text in block '") + role + "'");
  };
  switch (s.layout) {
    case SlideLayout::title:
      need(roles::title);
      return;
    case SlideLayout::rationale_text:
      need(roles::kicker);
      need(roles::narration);
      return;
    default:
      break;
  }
  need(roles::statement);
  need(roles::themes);
  const auto n = s.block(roles::themes).size();
  for (std::size_t i = 0; i < n; ++i)
    if (!s.text_blocks.count(roles::papers(i)))
      fail(ErrorCode::validation, "missing paper labels for theme " + std::to_string(i));
  for (const auto& [a, b] : s.edges)
    if (a >= n || b >= n) fail(ErrorCode::validation, "slide edge refers to a missing theme");
  if (s.layout == SlideLayout::coordinate_plane) {
    if (s.block(roles::poles).size() != 4) fail(ErrorCode::validation, "coordinate_plane slide needs 4 pole labels");
    need(roles::poles, 4);
    if (s.block(roles::quadrants).size() != n)
      fail(ErrorCode::validation, "coordinate_plane slide needs one quadrant per theme");
  }
}

Slide title_slide(const std::string& title, const std::string& subtitle) {
  Slide s;
  s.layout = SlideLayout::title;
  s.text_blocks[roles::title] = {title.empty() ? std::string("Research narrative") : title};
  if (!subtitle.empty()) s.text_blocks[roles::subtitle] = {subtitle};
  s.script = s.text_blocks[roles::title].front();
  if (!subtitle.empty()) s.script += ". " + subtitle;
  return s;
}

namespace {

std::string with_period(std::string s) {
  if (!s.empty() && s.back() != '.' && s.back() != '!' && s.back() != '?') s.push_back('.');
  return s;
}

char side_code(Pole p) { return p == Pole::a ? 'a' : 'b'; }

}  // namespace

Slide deck_from_perspective(const Perspective& p, const SelectionContext& ctx) {
  auto report = validate_perspective(p, ctx);
  report.merge(check_structure(p));
  if (!report.ok()) fail(ErrorCode::validation, "cannot build slide: " + report.summary());

  const auto& spec = framework_spec(p.framework);
  Slide s;
  s.layout = layout_for(p.framework);
  s.text_blocks[roles::title] = {spec.display_name + " narrative"};
  s.text_blocks[roles::statement] = {p.contribution_statement};
  auto& themes = s.text_blocks[roles::themes];
  for (std::size_t i = 0; i < p.clusters.size(); ++i) {
    themes.push_back(p.clusters[i].cluster_theme);
    auto& labels = s.text_blocks[roles::papers(i)];
    for (const auto& id : p.clusters[i].papers_assign) {
      const auto* paper = ctx.find(id);
      labels.push_back(paper ? id + ": " + paper->title : id);
    }
  }

  const auto n = p.clusters.size();
  if (p.framework == FrameworkKind::linear)
    for (std::size_t i = 0; i + 1 < n; ++i) s.edges.emplace_back(i, i + 1);
  if (p.framework == FrameworkKind::circular)
    for (std::size_t i = 0; i < n; ++i) s.edges.emplace_back(i, (i + 1) % n);

  std::string script = with_period(p.contribution_statement) + " ";
  if (p.framework == FrameworkKind::coordinate) {
    const auto& ax = *p.axes;
    s.text_blocks[roles::poles] = {ax.axis1.pole_a, ax.axis1.pole_b, ax.axis2.pole_a, ax.axis2.pole_b};
    auto& quads = s.text_blocks[roles::quadrants];
    for (std::size_t i = 0; i < n; ++i) {
      const auto q = ax.quadrant_of.at(i);
      quads.push_back(std::string{side_code(q.side1), side_code(q.side2)});
    }
    script += "The space is framed by two axes: " + ax.axis1.pole_a + " versus " + ax.axis1.pole_b + ", and " +
              ax.axis2.pole_a + " versus " + ax.axis2.pole_b + ". ";
  }
  script += "It is organized into " + std::to_string(n) + " themes";
  switch (p.framework) {
    case FrameworkKind::parallel: script += " that stand side by side"; break;
    case FrameworkKind::linear: script += " that build on one another in order"; break;
    case FrameworkKind::circular: script += " that form a loop, the last feeding back into the first"; break;
    case FrameworkKind::coordinate: script += ", each placed in one quadrant"; break;
  }
  script += ":";
  for (std::size_t i = 0; i < n; ++i)
    script += " (" + std::to_string(i + 1) + ") " + p.clusters[i].cluster_theme + (i + 1 < n ? ";" : ".");
  s.script = script;
  check_slide(s);
  return s;
}

Slide rationale_slide(const RationaleDraft& draft) {
  if (text::trim(draft.narration).empty()) fail(ErrorCode::validation, "rationale draft has empty narration");
  Slide s;
  s.layout = SlideLayout::rationale_text;
  s.text_blocks[roles::kicker] = {draft.strategy.name};
  s.text_blocks[roles::narration] = {draft.narration};
  s.script = draft.narration;
  return s;
}

void attach_visuals(DeckSpec& deck, VisualProvider& provider) {
  for (auto& s : deck.slides)
    if (auto v = provider.visual_for(s)) s.visual = std::move(v);
}

std::string export_deck_json(const DeckSpec& deck) {
  if (deck.slides.empty()) fail(ErrorCode::validation, "cannot export an empty deck");
  for (const auto& s : deck.slides) check_slide(s);
  return json(deck).dump(2) + "\n";
}

DeckSpec parse_deck_json(std::string_view bytes) {
  auto j = json::parse(bytes, nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::parse, "deck JSON is not well-formed");
  try {
    return j.get<DeckSpec>();
  } catch (const json::exception& e) {
    fail(ErrorCode::validation, std::string("deck JSON has the wrong shape: ") + e.what());
  }
}

}  // namespace narrativeforge
