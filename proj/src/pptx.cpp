#include <cmath>
#include <sstream>

#include "narrativeforge/deck.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/zip.hpp"

namespace narrativeforge {

namespace {

constexpr long kSlideW = 12192000;
constexpr long kSlideH = 6858000;

constexpr const char* kXmlDecl = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"yes\"?>\n";
constexpr const char* kNs =
    " xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\""
    " xmlns:r=\"http://schemas.openxmlformats.org/officeDocument/2006/relationships\""
    " xmlns:p=\"http://schemas.openxmlformats.org/presentationml/2006/main\"";
constexpr const char* kRelNs = "http://schemas.openxmlformats.org/package/2006/relationships";
constexpr const char* kRelBase = "http://schemas.openxmlformats.org/officeDocument/2006/relationships/";
constexpr const char* kCtBase = "application/vnd.openxmlformats-officedocument.presentationml.";

constexpr const char* kGroupProps =
    "<p:nvGrpSpPr><p:cNvPr id=\"1\" name=\"\"/><p:cNvGrpSpPr/><p:nvPr/></p:nvGrpSpPr>"
    "<p:grpSpPr><a:xfrm><a:off x=\"0\" y=\"0\"/><a:ext cx=\"0\" cy=\"0\"/><a:chOff x=\"0\" y=\"0\"/>"
    "<a:chExt cx=\"0\" cy=\"0\"/></a:xfrm></p:grpSpPr>";

constexpr const char* kClrMap =
    "bg1=\"lt1\" tx1=\"dk1\" bg2=\"lt2\" tx2=\"dk2\" accent1=\"accent1\" accent2=\"accent2\" "
    "accent3=\"accent3\" accent4=\"accent4\" accent5=\"accent5\" accent6=\"accent6\" hlink=\"hlink\" "
    "folHlink=\"folHlink\"";

std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default:
        // Control characters other than tab/newline are not legal XML 1.0.
        if (static_cast<unsigned char>(c) < 0x20 && c != '\t' && c != '\n' && c != '\r') break;
        out.push_back(c);
    }
  }
  return out;
}

struct Rel {
  std::string id, type, target;
};

std::string rels_xml(const std::vector<Rel>& rels) {
  std::string out = kXmlDecl;
  out += "<Relationships xmlns=\"";
  out += kRelNs;
  out += "\">";
  for (const auto& r : rels)
    out += "<Relationship Id=\"" + r.id + "\" Type=\"" + r.type + "\" Target=\"" + r.target + "\"/>";
  out += "</Relationships>";
  return out;
}

struct Para {
  std::string text;
  int size = 1400;  // hundredths of a point
  bool bold = false;
};

struct Box {
  long x = 0, y = 0, w = 0, h = 0;
};

// Accumulates the shapes of one slide.
class ShapeTree {
 public:
  void text(const std::string& name, Box b, const std::vector<Para>& paras, bool framed, const char* align = "ctr") {
    const int id = next_id_++;
    std::ostringstream o;
    o << "<p:sp><p:nvSpPr><p:cNvPr id=\"" << id << "\" name=\"" << xml_escape(name)
      << "\"/><p:cNvSpPr txBox=\"1\"/><p:nvPr/></p:nvSpPr><p:spPr>" << xfrm(b, false, false)
      << "<a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom>";
    if (framed)
      o << "<a:solidFill><a:srgbClr val=\"FFFFFF\"/></a:solidFill><a:ln w=\"12700\"><a:solidFill>"
           "<a:srgbClr val=\"404040\"/></a:solidFill></a:ln>";
    else
      o << "<a:noFill/>";
    o << "</p:spPr><p:txBody><a:bodyPr wrap=\"square\" lIns=\"45720\" rIns=\"45720\" anchor=\"ctr\">"
         "<a:normAutofit/></a:bodyPr><a:lstStyle/>";
    if (paras.empty()) o << "<a:p><a:endParaRPr lang=\"en-US\"/></a:p>";
    for (const auto& p : paras) {
      o << "<a:p><a:pPr algn=\"" << align << "\"/>";
      if (p.text.empty()) {
        o << "<a:endParaRPr lang=\"en-US\" sz=\"" << p.size << "\"/>";
      } else {
        o << "<a:r><a:rPr lang=\"en-US\" sz=\"" << p.size << "\"" << (p.bold ? " b=\"1\"" : "")
          << " dirty=\"0\"/><a:t>" << xml_escape(p.text) << "</a:t></a:r>";
      }
      o << "</a:p>";
    }
    o << "</p:txBody></p:sp>";
    body_ += o.str();
  }

  void line(const std::string& name, long x1, long y1, long x2, long y2, bool arrow) {
    const int id = next_id_++;
    const Box b{std::min(x1, x2), std::min(y1, y2), std::labs(x2 - x1), std::labs(y2 - y1)};
    std::ostringstream o;
    o << "<p:cxnSp><p:nvCxnSpPr><p:cNvPr id=\"" << id << "\" name=\"" << xml_escape(name)
      << "\"/><p:cNvCxnSpPr/><p:nvPr/></p:nvCxnSpPr><p:spPr>" << xfrm(b, x2 < x1, y2 < y1)
      << "<a:prstGeom prst=\"straightConnector1\"><a:avLst/></a:prstGeom><a:ln w=\"19050\"><a:solidFill>"
         "<a:srgbClr val=\"404040\"/></a:solidFill>"
      << (arrow ? "<a:tailEnd type=\"triangle\"/>" : "") << "</a:ln></p:spPr></p:cxnSp>";
    body_ += o.str();
  }

  std::string slide_xml() const {
    std::string out = kXmlDecl;
    out += "<p:sld";
    out += kNs;
    out += "><p:cSld><p:spTree>";
    out += kGroupProps;
    out += body_;
    out += "</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sld>";
    return out;
  }

 private:
  static std::string xfrm(Box b, bool flip_h, bool flip_v) {
    std::ostringstream o;
    o << "<a:xfrm" << (flip_h ? " flipH=\"1\"" : "") << (flip_v ? " flipV=\"1\"" : "") << "><a:off x=\"" << b.x
      << "\" y=\"" << b.y << "\"/><a:ext cx=\"" << b.w << "\" cy=\"" << b.h << "\"/></a:xfrm>";
    return o.str();
  }

  int next_id_ = 2;
  std::string body_;
};

std::vector<Para> theme_paras(const Slide& s, std::size_t i) {
  std::vector<Para> out{{std::to_string(i + 1) + ". " + s.block(roles::themes)[i], 1400, true}};
  for (const auto& label : s.block(roles::papers(i))) out.push_back({label, 900, false});
  return out;
}

void header(ShapeTree& t, const Slide& s) {
  const auto& title = s.block(roles::title);
  if (!title.empty()) t.text("Title", {457200, 150000, kSlideW - 914400, 420000}, {{title.front(), 1200, false}}, false, "l");
  t.text("Statement", {800000, 620000, kSlideW - 1600000, 820000}, {{s.block(roles::statement).front(), 2000, true}},
         true);
}

void render_parallel(ShapeTree& t, const Slide& s) {
  header(t, s);
  const auto n = static_cast<long>(s.block(roles::themes).size());
  const long margin = 400000, gap = 200000, top = 2000000;
  const long w = (kSlideW - 2 * margin - (n - 1) * gap) / n;
  const long root_x = kSlideW / 2, root_y = 620000 + 820000;
  for (long i = 0; i < n; ++i) {
    const long x = margin + i * (w + gap);
    t.line("Branch " + std::to_string(i + 1), root_x, root_y, x + w / 2, top, false);
  }
  for (long i = 0; i < n; ++i)
    t.text("Theme " + std::to_string(i + 1), {margin + i * (w + gap), top, w, kSlideH - top - 400000},
           theme_paras(s, static_cast<std::size_t>(i)), true);
}

void render_linear(ShapeTree& t, const Slide& s) {
  header(t, s);
  const auto n = static_cast<long>(s.block(roles::themes).size());
  const long margin = 400000, gap = 360000, top = 2000000, h = kSlideH - top - 400000;
  const long w = (kSlideW - 2 * margin - (n - 1) * gap) / n;
  auto left = [&](std::size_t i) { return margin + static_cast<long>(i) * (w + gap); };
  for (const auto& [a, b] : s.edges)
    t.line("Step " + std::to_string(a + 1) + " to " + std::to_string(b + 1), left(a) + w, top + h / 2, left(b),
           top + h / 2, true);
  for (long i = 0; i < n; ++i)
    t.text("Theme " + std::to_string(i + 1), {left(static_cast<std::size_t>(i)), top, w, h},
           theme_paras(s, static_cast<std::size_t>(i)), true);
}

void render_circular(ShapeTree& t, const Slide& s) {
  header(t, s);
  const auto n = s.block(roles::themes).size();
  const double cx = kSlideW / 2.0, cy = 4100000.0, rx = 3900000.0, ry = 1850000.0;
  const long w = 2700000, h = 1150000;
  std::vector<std::pair<long, long>> centers;
  for (std::size_t i = 0; i < n; ++i) {
    const double angle = -M_PI / 2 + 2 * M_PI * static_cast<double>(i) / static_cast<double>(n);
    centers.emplace_back(std::lround(cx + rx * std::cos(angle)), std::lround(cy + ry * std::sin(angle)));
  }
  // Arrows first so the boxes sit on top of them.
  for (const auto& [a, b] : s.edges)
    t.line("Link " + std::to_string(a + 1) + " to " + std::to_string(b + 1), centers[a].first, centers[a].second,
           centers[b].first, centers[b].second, true);
  for (std::size_t i = 0; i < n; ++i)
    t.text("Theme " + std::to_string(i + 1), {centers[i].first - w / 2, centers[i].second - h / 2, w, h},
           theme_paras(s, i), true);
}

void render_coordinate(ShapeTree& t, const Slide& s) {
  header(t, s);
  const auto& poles = s.block(roles::poles);
  const auto& quads = s.block(roles::quadrants);
  const long left = 1500000, right = kSlideW - 1500000, top = 1900000, bottom = kSlideH - 450000;
  const long mx = (left + right) / 2, my = (top + bottom) / 2;
  t.line("Axis 1", left, my, right, my, true);
  t.line("Axis 2", mx, bottom, mx, top, true);
  const long pw = 1300000, ph = 400000;
  t.text("Pole 1a", {left - pw - 50000, my - ph / 2, pw, ph}, {{poles[0], 1100, true}}, false, "r");
  t.text("Pole 1b", {right + 50000, my - ph / 2, pw, ph}, {{poles[1], 1100, true}}, false, "l");
  t.text("Pole 2a", {mx - pw, top - ph, 2 * pw, ph}, {{poles[2], 1100, true}}, false);
  t.text("Pole 2b", {mx - pw, bottom, 2 * pw, ph}, {{poles[3], 1100, true}}, false);

  // Stack the clusters that share a quadrant.
  std::map<std::string, std::vector<std::size_t>> by_quadrant;
  for (std::size_t i = 0; i < quads.size(); ++i) by_quadrant[quads[i]].push_back(i);
  const long qw = (right - left) / 2 - 300000, pad = 150000;
  for (const auto& [code, members] : by_quadrant) {
    const long qx = code[0] == 'a' ? left + pad : mx + pad;
    const long qy = code[1] == 'a' ? top + pad : my + pad;
    const long qh = (bottom - top) / 2 - 2 * pad;
    const long bh = qh / static_cast<long>(members.size());
    for (std::size_t k = 0; k < members.size(); ++k)
      t.text("Theme " + std::to_string(members[k] + 1), {qx, qy + static_cast<long>(k) * bh, qw, bh - 60000},
             theme_paras(s, members[k]), true);
  }
}

void render_rationale(ShapeTree& t, const Slide& s) {
  t.text("Kicker", {800000, 500000, kSlideW - 1600000, 600000}, {{s.block(roles::kicker).front(), 1600, true}}, false,
         "l");
  std::vector<Para> body;
  for (const auto& n : s.block(roles::narration)) body.push_back({n, 2000, false});
  t.text("Narration", {800000, 1300000, kSlideW - 1600000, kSlideH - 2000000}, body, false, "l");
}

void render_title(ShapeTree& t, const Slide& s) {
  t.text("Title", {800000, 2100000, kSlideW - 1600000, 1300000}, {{s.block(roles::title).front(), 3600, true}}, false);
  const auto& sub = s.block(roles::subtitle);
  if (!sub.empty()) t.text("Subtitle", {800000, 3500000, kSlideW - 1600000, 900000}, {{sub.front(), 1800, false}}, false);
}

std::string render_slide(const Slide& s) {
  ShapeTree t;
  switch (s.layout) {
    case SlideLayout::parallel_tree: render_parallel(t, s); break;
    case SlideLayout::linear_chain: render_linear(t, s); break;
    case SlideLayout::circular_ring: render_circular(t, s); break;
    case SlideLayout::coordinate_plane: render_coordinate(t, s); break;
    case SlideLayout::rationale_text: render_rationale(t, s); break;
    case SlideLayout::title: render_title(t, s); break;
  }
  if (s.visual)
    t.text("Visual placeholder", {kSlideW - 2900000, kSlideH - 1700000, 2500000, 1400000},
           {{"[visual: " + *s.visual + "]", 1000, false}}, true);
  return t.slide_xml();
}

std::string notes_xml(const Slide& s) {
  std::string out = kXmlDecl;
  out += "<p:notes";
  out += kNs;
  out += "><p:cSld><p:spTree>";
  out += kGroupProps;
  out +=
      "<p:sp><p:nvSpPr><p:cNvPr id=\"2\" name=\"Slide Image Placeholder 1\"/><p:cNvSpPr><a:spLocks noGrp=\"1\" "
      "noRot=\"1\" noChangeAspect=\"1\"/></p:cNvSpPr><p:nvPr><p:ph type=\"sldImg\"/></p:nvPr></p:nvSpPr>"
      "<p:spPr/></p:sp>"
      "<p:sp><p:nvSpPr><p:cNvPr id=\"3\" name=\"Notes Placeholder 2\"/><p:cNvSpPr><a:spLocks noGrp=\"1\"/>"
      "</p:cNvSpPr><p:nvPr><p:ph type=\"body\" idx=\"1\"/></p:nvPr></p:nvSpPr><p:spPr/><p:txBody><a:bodyPr/>"
      "<a:lstStyle/>";
  std::istringstream lines(s.script);
  std::string line;
  bool any = false;
  while (std::getline(lines, line)) {
    any = true;
    if (line.empty())
      out += "<a:p><a:endParaRPr lang=\"en-US\"/></a:p>";
    else
      out += "<a:p><a:r><a:rPr lang=\"en-US\" dirty=\"0\"/><a:t>" + xml_escape(line) + "</a:t></a:r></a:p>";
  }
  if (!any) out += "<a:p><a:endParaRPr lang=\"en-US\"/></a:p>";
  out += "</p:txBody></p:sp></p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:notes>";
  return out;
}

std::string theme_xml(const std::string& name) {
  std::string out = kXmlDecl;
  out += "<a:theme xmlns:a=\"http://schemas.openxmlformats.org/drawingml/2006/main\" name=\"" + name + "\">";
  out +=
      "<a:themeElements><a:clrScheme name=\"Plain\">"
      "<a:dk1><a:sysClr val=\"windowText\" lastClr=\"000000\"/></a:dk1>"
      "<a:lt1><a:sysClr val=\"window\" lastClr=\"FFFFFF\"/></a:lt1>"
      "<a:dk2><a:srgbClr val=\"1F2937\"/></a:dk2><a:lt2><a:srgbClr val=\"F3F4F6\"/></a:lt2>"
      "<a:accent1><a:srgbClr val=\"2563EB\"/></a:accent1><a:accent2><a:srgbClr val=\"DC2626\"/></a:accent2>"
      "<a:accent3><a:srgbClr val=\"16A34A\"/></a:accent3><a:accent4><a:srgbClr val=\"9333EA\"/></a:accent4>"
      "<a:accent5><a:srgbClr val=\"EA580C\"/></a:accent5><a:accent6><a:srgbClr val=\"0891B2\"/></a:accent6>"
      "<a:hlink><a:srgbClr val=\"1D4ED8\"/></a:hlink><a:folHlink><a:srgbClr val=\"7C3AED\"/></a:folHlink>"
      "</a:clrScheme>"
      "<a:fontScheme name=\"Plain\"><a:majorFont><a:latin typeface=\"Calibri\"/><a:ea typeface=\"\"/>"
      "<a:cs typeface=\"\"/></a:majorFont><a:minorFont><a:latin typeface=\"Calibri\"/><a:ea typeface=\"\"/>"
      "<a:cs typeface=\"\"/></a:minorFont></a:fontScheme>"
      "<a:fmtScheme name=\"Plain\"><a:fillStyleLst>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:fillStyleLst>"
      "<a:lnStyleLst><a:ln w=\"6350\"><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln>"
      "<a:ln w=\"12700\"><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln>"
      "<a:ln w=\"19050\"><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:ln></a:lnStyleLst>"
      "<a:effectStyleLst><a:effectStyle><a:effectLst/></a:effectStyle><a:effectStyle><a:effectLst/>"
      "</a:effectStyle><a:effectStyle><a:effectLst/></a:effectStyle></a:effectStyleLst>"
      "<a:bgFillStyleLst><a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill>"
      "<a:solidFill><a:schemeClr val=\"phClr\"/></a:solidFill></a:bgFillStyleLst>"
      "</a:fmtScheme></a:themeElements><a:objectDefaults/><a:extraClrSchemeLst/></a:theme>";
  return out;
}

std::string slide_master_xml() {
  std::string out = kXmlDecl;
  out += "<p:sldMaster";
  out += kNs;
  out += "><p:cSld><p:bg><p:bgRef idx=\"1001\"><a:schemeClr val=\"bg1\"/></p:bgRef></p:bg><p:spTree>";
  out += kGroupProps;
  out += "</p:spTree></p:cSld><p:clrMap ";
  out += kClrMap;
  out +=
      "/><p:sldLayoutIdLst><p:sldLayoutId id=\"2147483649\" r:id=\"rId1\"/></p:sldLayoutIdLst><p:txStyles>"
      "<p:titleStyle><a:lvl1pPr><a:defRPr sz=\"3200\"/></a:lvl1pPr></p:titleStyle>"
      "<p:bodyStyle><a:lvl1pPr><a:defRPr sz=\"1800\"/></a:lvl1pPr></p:bodyStyle>"
      "<p:otherStyle><a:lvl1pPr><a:defRPr sz=\"1800\"/></a:lvl1pPr></p:otherStyle></p:txStyles></p:sldMaster>";
  return out;
}

std::string slide_layout_xml() {
  std::string out = kXmlDecl;
  out += "<p:sldLayout";
  out += kNs;
  out += " type=\"blank\" preserve=\"1\"><p:cSld name=\"Blank\"><p:spTree>";
  out += kGroupProps;
  out += "</p:spTree></p:cSld><p:clrMapOvr><a:masterClrMapping/></p:clrMapOvr></p:sldLayout>";
  return out;
}

std::string notes_master_xml() {
  std::string out = kXmlDecl;
  out += "<p:notesMaster";
  out += kNs;
  out += "><p:cSld><p:bg><p:bgRef idx=\"1001\"><a:schemeClr val=\"bg1\"/></p:bgRef></p:bg><p:spTree>";
  out += kGroupProps;
  out +=
      "<p:sp><p:nvSpPr><p:cNvPr id=\"2\" name=\"Notes Placeholder 1\"/><p:cNvSpPr><a:spLocks noGrp=\"1\"/>"
      "</p:cNvSpPr><p:nvPr><p:ph type=\"body\" idx=\"1\"/></p:nvPr></p:nvSpPr><p:spPr><a:xfrm>"
      "<a:off x=\"685800\" y=\"4400550\"/><a:ext cx=\"5486400\" cy=\"3600450\"/></a:xfrm>"
      "<a:prstGeom prst=\"rect\"><a:avLst/></a:prstGeom></p:spPr><p:txBody><a:bodyPr/><a:lstStyle/>"
      "<a:p><a:endParaRPr lang=\"en-US\"/></a:p></p:txBody></p:sp>";
  out += "</p:spTree></p:cSld><p:clrMap ";
  out += kClrMap;
  out += "/></p:notesMaster>";
  return out;
}

std::string presentation_xml(std::size_t slides) {
  std::ostringstream o;
  o << kXmlDecl << "<p:presentation" << kNs << " saveSubsetFonts=\"1\">"
    << "<p:sldMasterIdLst><p:sldMasterId id=\"2147483648\" r:id=\"rId1\"/></p:sldMasterIdLst>"
    << "<p:notesMasterIdLst><p:notesMasterId r:id=\"rId2\"/></p:notesMasterIdLst><p:sldIdLst>";
  for (std::size_t i = 0; i < slides; ++i) o << "<p:sldId id=\"" << 256 + i << "\" r:id=\"rId" << 5 + i << "\"/>";
  o << "</p:sldIdLst><p:sldSz cx=\"" << kSlideW << "\" cy=\"" << kSlideH
    << "\"/><p:notesSz cx=\"6858000\" cy=\"9144000\"/></p:presentation>";
  return o.str();
}

std::string content_types_xml(std::size_t slides) {
  std::string out = kXmlDecl;
  out +=
      "<Types xmlns=\"http://schemas.openxmlformats.org/package/2006/content-types\">"
      "<Default Extension=\"rels\" ContentType=\"application/vnd.openxmlformats-package.relationships+xml\"/>"
      "<Default Extension=\"xml\" ContentType=\"application/xml\"/>";
  auto override_part = [&](const std::string& part, const std::string& type) {
    out += "<Override PartName=\"" + part + "\" ContentType=\"" + type + "\"/>";
  };
  const std::string ct = kCtBase;
  override_part("/ppt/presentation.xml", ct + "presentation.main+xml");
  override_part("/ppt/presProps.xml", ct + "presProps+xml");
  override_part("/ppt/slideMasters/slideMaster1.xml", ct + "slideMaster+xml");
  override_part("/ppt/slideLayouts/slideLayout1.xml", ct + "slideLayout+xml");
  override_part("/ppt/notesMasters/notesMaster1.xml", ct + "notesMaster+xml");
  override_part("/ppt/theme/theme1.xml", "application/vnd.openxmlformats-officedocument.theme+xml");
  override_part("/ppt/theme/theme2.xml", "application/vnd.openxmlformats-officedocument.theme+xml");
  for (std::size_t i = 1; i <= slides; ++i) {
    override_part("/ppt/slides/slide" + std::to_string(i) + ".xml", ct + "slide+xml");
    override_part("/ppt/notesSlides/notesSlide" + std::to_string(i) + ".xml", ct + "notesSlide+xml");
  }
  override_part("/docProps/core.xml", "application/vnd.openxmlformats-package.core-properties+xml");
  override_part("/docProps/app.xml", "application/vnd.openxmlformats-officedocument.extended-properties+xml");
  out += "</Types>";
  return out;
}

std::string core_xml(const DeckMeta& meta) {
  std::string out = kXmlDecl;
  out +=
      "<cp:coreProperties xmlns:cp=\"http://schemas.openxmlformats.org/package/2006/metadata/core-properties\" "
      "xmlns:dc=\"http://purl.org/dc/elements/1.1/\"><dc:title>" +
      xml_escape(meta.focus.empty() ? std::string("Research narrative") : meta.focus) + "</dc:title><dc:creator>" +
      xml_escape(meta.engine_version) + "</dc:creator></cp:coreProperties>";
  return out;
}

std::string app_xml(std::size_t slides) {
  std::string out = kXmlDecl;
  out +=
      "<Properties xmlns=\"http://schemas.openxmlformats.org/officeDocument/2006/extended-properties\">"
      "<Application>narrativeforge</Application><Slides>" +
      std::to_string(slides) + "</Slides><Notes>" + std::to_string(slides) + "</Notes></Properties>";
  return out;
}

}  // namespace

std::string export_pptx(const DeckSpec& deck) {
  if (deck.slides.empty()) fail(ErrorCode::validation, "cannot export an empty deck");
  for (const auto& s : deck.slides) check_slide(s);
  const auto n = deck.slides.size();
  const std::string rel = kRelBase;

  ZipWriter zip;
  zip.add("[Content_Types].xml", content_types_xml(n));
  zip.add("_rels/.rels", rels_xml({{"rId1", rel + "officeDocument", "ppt/presentation.xml"},
                                   {"rId2", "http://schemas.openxmlformats.org/package/2006/relationships/metadata/"
                                            "core-properties",
                                    "docProps/core.xml"},
                                   {"rId3", rel + "extended-properties", "docProps/app.xml"}}));
  zip.add("docProps/core.xml", core_xml(deck.meta));
  zip.add("docProps/app.xml", app_xml(n));

  std::vector<Rel> pres_rels{{"rId1", rel + "slideMaster", "slideMasters/slideMaster1.xml"},
                             {"rId2", rel + "notesMaster", "notesMasters/notesMaster1.xml"},
                             {"rId3", rel + "theme", "theme/theme1.xml"},
                             {"rId4", rel + "presProps", "presProps.xml"}};
  for (std::size_t i = 1; i <= n; ++i)
    pres_rels.push_back({"rId" + std::to_string(4 + i), rel + "slide", "slides/slide" + std::to_string(i) + ".xml"});
  zip.add("ppt/presentation.xml", presentation_xml(n));
  zip.add("ppt/_rels/presentation.xml.rels", rels_xml(pres_rels));
  zip.add("ppt/presProps.xml", std::string(kXmlDecl) + "<p:presentationPr" + kNs + "/>");

  zip.add("ppt/slideMasters/slideMaster1.xml", slide_master_xml());
  zip.add("ppt/slideMasters/_rels/slideMaster1.xml.rels",
          rels_xml({{"rId1", rel + "slideLayout", "../slideLayouts/slideLayout1.xml"},
                    {"rId2", rel + "theme", "../theme/theme1.xml"}}));
  zip.add("ppt/slideLayouts/slideLayout1.xml", slide_layout_xml());
  zip.add("ppt/slideLayouts/_rels/slideLayout1.xml.rels",
          rels_xml({{"rId1", rel + "slideMaster", "../slideMasters/slideMaster1.xml"}}));
  zip.add("ppt/notesMasters/notesMaster1.xml", notes_master_xml());
  zip.add("ppt/notesMasters/_rels/notesMaster1.xml.rels", rels_xml({{"rId1", rel + "theme", "../theme/theme2.xml"}}));
  zip.add("ppt/theme/theme1.xml", theme_xml("Slides"));
  zip.add("ppt/theme/theme2.xml", theme_xml("Notes"));

  for (std::size_t i = 1; i <= n; ++i) {
    const auto& s = deck.slides[i - 1];
    const auto num = std::to_string(i);
    zip.add("ppt/slides/slide" + num + ".xml", render_slide(s));
    zip.add("ppt/slides/_rels/slide" + num + ".xml.rels",
            rels_xml({{"rId1", rel + "slideLayout", "../slideLayouts/slideLayout1.xml"},
                      {"rId2", rel + "notesSlide", "../notesSlides/notesSlide" + num + ".xml"}}));
    zip.add("ppt/notesSlides/notesSlide" + num + ".xml", notes_xml(s));
    zip.add("ppt/notesSlides/_rels/notesSlide" + num + ".xml.rels",
            rels_xml({{"rId1", rel + "notesMaster", "../notesMasters/notesMaster1.xml"},
                      {"rId2", rel + "slide", "../slides/slide" + num + ".xml"}}));
  }
  return zip.finish();
}

}  // namespace narrativeforge
