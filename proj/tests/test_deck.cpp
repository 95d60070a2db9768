#include <doctest.h>

#include <regex>
#include <set>

#include "narrativeforge/deck.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/zip.hpp"
#include "support.hpp"

using namespace narrativeforge;
using nlohmann::json;

namespace {

DeckSpec sample_deck() {
  const auto ctx = nf_test::make_ctx(10);
  DeckSpec deck;
  deck.meta = {ctx.overall_focus, "2026-01-01T00:00:00Z", engine_version()};
  deck.slides.push_back(title_slide("Research & <narratives>", "A \"quoted\" subtitle"));
  for (auto kind : kAllFrameworks) deck.slides.push_back(deck_from_perspective(nf_test::make_perspective(kind, 4, ctx), ctx));
  RationaleDraft d{strategy_catalog().front(), "Touch matters. It is how we trust.", "abc"};
  deck.slides.push_back(rationale_slide(d));
  return deck;
}

class LabelVisuals : public VisualProvider {
 public:
  std::optional<std::string> visual_for(const Slide& s) override {
    if (s.layout == SlideLayout::title) return std::nullopt;
    return "img-" + std::string(to_string(s.layout));
  }
};

}  // namespace

TEST_CASE("framework to layout mapping is a bijection") {
  std::set<SlideLayout> seen;
  for (auto kind : kAllFrameworks) {
    const auto layout = layout_for(kind);
    CHECK(seen.insert(layout).second);
    CHECK(framework_for(layout) == kind);
    CHECK(slide_layout_from_string(to_string(layout)) == layout);
  }
  CHECK_FALSE(framework_for(SlideLayout::title));
  CHECK_FALSE(framework_for(SlideLayout::rationale_text));
}

TEST_CASE("perspective slides carry the framework structure") {
  const auto ctx = nf_test::make_ctx(8);
  const auto linear = deck_from_perspective(nf_test::make_perspective(FrameworkKind::linear, 4, ctx), ctx);
  CHECK(linear.layout == SlideLayout::linear_chain);
  CHECK(linear.block(roles::themes).size() == 4);
  CHECK(linear.edges == std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(linear.block(roles::papers(0)).front() == "p1: " + ctx.selected[0].title);
  CHECK_FALSE(linear.script.empty());

  const auto ring = deck_from_perspective(nf_test::make_perspective(FrameworkKind::circular, 3, ctx), ctx);
  CHECK(ring.edges.back() == std::pair<std::size_t, std::size_t>{2, 0});

  const auto plane = deck_from_perspective(nf_test::make_perspective(FrameworkKind::coordinate, 4, ctx), ctx);
  CHECK(plane.block(roles::poles).size() == 4);
  CHECK(plane.block(roles::quadrants) == std::vector<std::string>{"aa", "ab", "ba", "bb"});

  auto broken = nf_test::make_perspective(FrameworkKind::parallel, 3, ctx);
  broken.clusters[0].papers_assign.push_back("zz");
  CHECK_THROWS_AS(deck_from_perspective(broken, ctx), Error);

  CHECK_THROWS_AS(rationale_slide(RationaleDraft{strategy_catalog().front(), "  ", "x"}), Error);
}

TEST_CASE("check_slide enforces required blocks") {
  auto s = sample_deck().slides.at(2);
  CHECK_NOTHROW(check_slide(s));
  s.text_blocks.erase(roles::themes);
  CHECK_THROWS_AS(check_slide(s), Error);

  auto e = sample_deck().slides.at(2);
  e.edges.push_back({0, 99});
  CHECK_THROWS_AS(check_slide(e), Error);
}

TEST_CASE("deck JSON round-trips byte-stably") {
  auto deck = sample_deck();
  LabelVisuals visuals;
  attach_visuals(deck, visuals);
  CHECK(deck.slides[1].visual == "img-parallel_tree");
  CHECK_FALSE(deck.slides[0].visual);

  const auto bytes = export_deck_json(deck);
  const auto back = parse_deck_json(bytes);
  CHECK(back == deck);
  CHECK(export_deck_json(back) == bytes);
  CHECK_THROWS_AS(parse_deck_json("{\"slides\": 3}"), Error);
  CHECK_THROWS_AS(export_deck_json(DeckSpec{}), Error);

  NoVisuals none;
  auto plain = sample_deck();
  attach_visuals(plain, none);
  for (const auto& s : plain.slides) CHECK_FALSE(s.visual);
}

TEST_CASE("crc32 and zip writer") {
  CHECK(crc32_of("123456789") == 0xCBF43926u);
  ZipWriter zip;
  zip.add("a.txt", "hello");
  zip.add("dir/b.bin", std::string(5000, 'x'));
  const auto bytes = zip.finish();
  const auto entries = nf_test::read_zip(bytes);
  CHECK(entries.at("a.txt") == "hello");
  CHECK(entries.at("dir/b.bin") == std::string(5000, 'x'));
  CHECK(bytes.size() < 1000);  // deflated
}

TEST_CASE("pptx package is structurally valid") {
  auto deck = sample_deck();
  LabelVisuals visuals;
  attach_visuals(deck, visuals);
  const auto bytes = export_pptx(deck);
  CHECK(bytes == export_pptx(deck));

  const auto parts = nf_test::read_zip(bytes);
  for (const auto* required : {"[Content_Types].xml", "_rels/.rels", "ppt/presentation.xml",
                               "ppt/_rels/presentation.xml.rels", "ppt/slideMasters/slideMaster1.xml",
                               "ppt/slideLayouts/slideLayout1.xml", "ppt/theme/theme1.xml"})
    CHECK_MESSAGE(parts.count(required), required);

  const std::regex slide_re(R"(^ppt/slides/slide\d+\.xml$)"), notes_re(R"(^ppt/notesSlides/notesSlide\d+\.xml$)");
  std::size_t slides = 0, notes = 0;
  for (const auto& [name, data] : parts) {
    if (std::regex_match(name, slide_re)) ++slides;
    if (std::regex_match(name, notes_re)) ++notes;
    if (name.size() > 4 && (name.ends_with(".xml") || name.ends_with(".rels")))
      CHECK_MESSAGE(nf_test::xml_problem(data).empty(), name << ": " << nf_test::xml_problem(data));
  }
  CHECK(slides == deck.slides.size());
  CHECK(notes == deck.slides.size());

  // Every slide is listed in the presentation and its content types.
  const auto& pres = parts.at("ppt/presentation.xml");
  const auto& types = parts.at("[Content_Types].xml");
  const auto& rels = parts.at("ppt/_rels/presentation.xml.rels");
  for (std::size_t i = 1; i <= deck.slides.size(); ++i) {
    const auto part = "slides/slide" + std::to_string(i) + ".xml";
    CHECK(types.find("/ppt/" + part) != std::string::npos);
    CHECK(rels.find(part) != std::string::npos);
  }
  std::size_t ids = 0;
  for (auto pos = pres.find("<p:sldId "); pos != std::string::npos; pos = pres.find("<p:sldId ", pos + 1)) ++ids;
  CHECK(ids == deck.slides.size());

  // Text is escaped and speaker scripts land in the notes.
  CHECK(parts.at("ppt/slides/slide1.xml").find("Research &amp; &lt;narratives&gt;") != std::string::npos);
  CHECK(parts.at("ppt/notesSlides/notesSlide6.xml").find("Touch matters.") != std::string::npos);
  CHECK(parts.at("ppt/slides/slide2.xml").find("[visual: img-parallel_tree]") != std::string::npos);

  CHECK_THROWS_AS(export_pptx(DeckSpec{}), Error);
}
