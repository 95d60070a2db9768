#pragma once

#include <map>
#include <json.hpp>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/rationale.hpp"
#include "narrativeforge/schema.hpp"

namespace narrativeforge {

enum class SlideLayout { parallel_tree, linear_chain, circular_ring, coordinate_plane, rationale_text, title };

std::string_view to_string(SlideLayout layout);
SlideLayout slide_layout_from_string(std::string_view s);

// One template per framework; the mapping is a bijection onto the first four layouts.
SlideLayout layout_for(FrameworkKind kind);
std::optional<FrameworkKind> framework_for(SlideLayout layout);

// Text block roles. List-valued roles hold one entry per item.
namespace roles {
inline constexpr const char* title = "title";
inline constexpr const char* subtitle = "subtitle";
inline constexpr const char* statement = "statement";
inline constexpr const char* themes = "themes";
inline constexpr const char* poles = "poles";  // axis1.a, axis1.b, axis2.a, axis2.b
inline constexpr const char* quadrants = "quadrants";  // "ab" style codes per cluster
inline constexpr const char* kicker = "kicker";
inline constexpr const char* narration = "narration";
// "papers0", "papers1", ... hold "id: title" labels of each cluster.
std::string papers(std::size_t cluster);
}  // namespace roles

struct Slide {
  SlideLayout layout = SlideLayout::title;
  std::map<std::string, std::vector<std::string>> text_blocks;
  std::vector<std::pair<std::size_t, std::size_t>> edges;  // between theme indices
  std::string script;
  std::optional<std::string> visual;  // placeholder reference, rendered as an empty labeled frame

  const std::vector<std::string>& block(const std::string& role) const;
  bool operator==(const Slide&) const = default;
};

struct DeckMeta {
  std::string focus;
  std::string created_at;
  std::string engine_version;

  bool operator==(const DeckMeta&) const = default;
};

struct DeckSpec {
  std::vector<Slide> slides;
  DeckMeta meta;

  bool operator==(const DeckSpec&) const = default;
};

void to_json(nlohmann::json& j, const Slide& s);
void from_json(const nlohmann::json& j, Slide& s);
void to_json(nlohmann::json& j, const DeckSpec& d);
void from_json(const nlohmann::json& j, DeckSpec& d);

// Throws Error(validation) when the layout's required blocks are missing.
void check_slide(const Slide& s);

std::string engine_version();

Slide title_slide(const std::string& title, const std::string& subtitle);

/// One framework-templated slide. `ctx` supplies the paper titles used for the
/// paper labels. Invalid or structurally broken perspectives throw Error(validation).
Slide deck_from_perspective(const Perspective& p, const SelectionContext& ctx);

// Precondition: non-empty narration, otherwise Error(validation).
Slide rationale_slide(const RationaleDraft& draft);

// Image generation hook. The default implementation does nothing.
class VisualProvider {
 public:
  virtual ~VisualProvider() = default;
  virtual std::optional<std::string> visual_for(const Slide& slide) = 0;
};

class NoVisuals final : public VisualProvider {
 public:
  std::optional<std::string> visual_for(const Slide&) override { return std::nullopt; }
};

void attach_visuals(DeckSpec& deck, VisualProvider& provider);

std::string export_deck_json(const DeckSpec& deck);
DeckSpec parse_deck_json(std::string_view bytes);

// Office Open XML presentation package. Empty decks throw Error(validation).
std::string export_pptx(const DeckSpec& deck);

}  // namespace narrativeforge
