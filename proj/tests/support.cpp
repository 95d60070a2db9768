#include "support.hpp"

#include <zlib.h>

#include <atomic>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <unistd.h>

namespace nf_test {

using nlohmann::json;

Corpus make_corpus(std::size_t n) {
  Corpus c;
  for (std::size_t i = 1; i <= n; ++i) {
    PaperRecord p;
    p.id = "p" + std::to_string(i);
    p.title = "Paper " + std::to_string(i) + " on topic " + std::to_string((i - 1) % 3);
    p.abstract_text = "Abstract of paper " + std::to_string(i) + ".";
    p.citation = "Author " + std::to_string(i) + ". " + p.title + ". Venue. 2024.";
    p.year = 2020 + static_cast<int>(i % 5);
    c.papers.push_back(p);
  }
  return c;
}

SelectionContext make_ctx(std::size_t n, const std::string& focus, const std::string& intent) {
  SelectionContext ctx;
  ctx.selected = make_corpus(n).papers;
  ctx.overall_focus = focus;
  ctx.researcher_intent = intent;
  return ctx;
}

Perspective make_perspective(FrameworkKind kind, std::size_t clusters, const SelectionContext& ctx,
                             const std::string& tag) {
  Perspective p;
  p.framework = kind;
  p.contribution_statement = "Statement " + tag;
  p.contribution_statement_description = "Description " + tag;
  const auto n = ctx.selected.size();
  for (std::size_t c = 0; c < clusters; ++c) {
    Cluster cl;
    cl.cluster_theme = "Theme " + tag + std::to_string(c);
    cl.cluster_description = "About theme " + std::to_string(c);
    const auto lo = c * n / clusters, hi = (c + 1) * n / clusters;
    for (auto i = lo; i < hi; ++i) cl.papers_assign.push_back(ctx.selected[i].id);
    p.clusters.push_back(cl);
  }
  if (kind == FrameworkKind::coordinate) {
    AxisPair ax;
    ax.axis1 = {"Individual", "Collective"};
    ax.axis2 = {"Physical", "Digital"};
    for (std::size_t c = 0; c < clusters; ++c)
      ax.quadrant_of[c] = Quadrant{(c / 2) % 2 ? Pole::b : Pole::a, c % 2 ? Pole::b : Pole::a};
    p.axes = ax;
  }
  return p;
}

json llm_candidate(const Perspective& p) {
  json j = p;
  j.erase("framework");
  j.erase("locks");
  if (j.contains("axes") && j["axes"].is_null()) j.erase("axes");
  return j;
}

std::string topdown_response(const std::vector<Perspective>& ps) {
  json arr = json::array();
  for (const auto& p : ps) arr.push_back(llm_candidate(p));
  return json{{"contribution_statements", arr}}.dump(2);
}

std::filesystem::path fixture_dir() { return NF_FIXTURE_DIR; }

std::string read_fixture(const std::string& relative) {
  std::ifstream in(fixture_dir() / relative, std::ios::binary);
  if (!in) throw std::runtime_error("missing fixture " + relative);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::filesystem::path temp_dir(const std::string& tag) {
  static std::atomic<int> counter{0};
  auto dir = std::filesystem::temp_directory_path() /
             ("nf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

namespace {

std::uint32_t le32(const std::string& b, std::size_t at) {
  if (at + 4 > b.size()) throw std::runtime_error("truncated zip");
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t le16(const std::string& b, std::size_t at) {
  if (at + 2 > b.size()) throw std::runtime_error("truncated zip");
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

std::string inflate_raw(const std::string& data, std::size_t expected) {
  std::string out(expected, '\0');
  z_stream zs{};
  if (inflateInit2(&zs, -15) != Z_OK) throw std::runtime_error("inflateInit2");
  zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
  zs.avail_in = static_cast<uInt>(data.size());
  zs.next_out = reinterpret_cast<Bytef*>(out.data());
  zs.avail_out = static_cast<uInt>(out.size());
  const int rc = inflate(&zs, Z_FINISH);
  const auto produced = zs.total_out;
  inflateEnd(&zs);
  if (rc != Z_STREAM_END || produced != expected) throw std::runtime_error("inflate failed");
  return out;
}

}  // namespace

std::map<std::string, std::string> read_zip(const std::string& b) {
  if (b.size() < 22) throw std::runtime_error("too small for a zip");
  std::size_t eocd = std::string::npos;
  for (std::size_t i = b.size() - 22 + 1; i-- > 0;) {
    if (le32(b, i) == 0x06054b50) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos) throw std::runtime_error("no end-of-central-directory record");
  const auto count = le16(b, eocd + 10);
  const auto cd_size = le32(b, eocd + 12);
  const auto cd_offset = le32(b, eocd + 16);
  if (cd_offset + cd_size != eocd) throw std::runtime_error("central directory does not end at EOCD");

  std::map<std::string, std::string> entries;
  std::size_t at = cd_offset;
  for (std::size_t e = 0; e < count; ++e) {
    if (le32(b, at) != 0x02014b50) throw std::runtime_error("bad central directory signature");
    const auto method = le16(b, at + 10);
    const auto crc = le32(b, at + 16);
    const auto csize = le32(b, at + 20);
    const auto usize = le32(b, at + 24);
    const auto nlen = le16(b, at + 28), xlen = le16(b, at + 30), clen = le16(b, at + 32);
    const auto local = le32(b, at + 42);
    const auto name = b.substr(at + 46, nlen);
    at += 46 + nlen + xlen + clen;

    if (le32(b, local) != 0x04034b50) throw std::runtime_error("bad local header for " + name);
    const auto lnlen = le16(b, local + 26), lxlen = le16(b, local + 28);
    if (b.substr(local + 30, lnlen) != name) throw std::runtime_error("local name mismatch for " + name);
    const auto data_at = local + 30 + lnlen + lxlen;
    if (data_at + csize > cd_offset) throw std::runtime_error("entry overruns central directory: " + name);
    const auto raw = b.substr(data_at, csize);
    std::string data;
    if (method == 8)
      data = inflate_raw(raw, usize);
    else if (method == 0)
      data = raw;
    else
      throw std::runtime_error("unsupported compression method for " + name);
    const auto actual = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size())));
    if (actual != crc) throw std::runtime_error("CRC mismatch for " + name);
    if (!entries.emplace(name, std::move(data)).second) throw std::runtime_error("duplicate entry " + name);
  }
  return entries;
}

namespace {

bool name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == ':'; }
bool name_char(char c) {
  return name_start(c) || std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '.';
}

struct XmlChecker {
  const std::string& s;
  std::size_t i = 0;

  std::string problem(const std::string& what) const { return what + " at offset " + std::to_string(i); }

  void skip_ws() {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
  }

  bool name(std::string& out) {
    if (i >= s.size() || !name_start(s[i])) return false;
    const auto start = i;
    while (i < s.size() && name_char(s[i])) ++i;
    out = s.substr(start, i - start);
    return true;
  }

  // Validates one entity reference starting at '&'.
  bool entity() {
    const auto end = s.find(';', i);
    if (end == std::string::npos || end - i > 10) return false;
    const auto ref = s.substr(i + 1, end - i - 1);
    static const std::set<std::string> named{"amp", "lt", "gt", "quot", "apos"};
    bool ok = named.count(ref) > 0;
    if (!ok && ref.size() > 1 && ref[0] == '#') {
      const bool hex = ref[1] == 'x';
      ok = ref.size() > (hex ? 2u : 1u);
      for (std::size_t k = hex ? 2 : 1; k < ref.size() && ok; ++k)
        ok = hex ? std::isxdigit(static_cast<unsigned char>(ref[k])) : std::isdigit(static_cast<unsigned char>(ref[k]));
    }
    i = end + 1;
    return ok;
  }

  std::string run() {
    if (s.compare(0, 5, "<?xml") == 0) {
      const auto end = s.find("?>");
      if (end == std::string::npos) return problem("unterminated declaration");
      i = end + 2;
    }
    std::vector<std::string> stack;
    bool seen_root = false;
    while (true) {
      if (stack.empty()) skip_ws();
      if (i >= s.size()) break;
      if (s[i] == '<') {
        if (s.compare(i, 4, "<!--") == 0) {
          const auto end = s.find("-->", i);
          if (end == std::string::npos) return problem("unterminated comment");
          i = end + 3;
          continue;
        }
        ++i;
        if (i < s.size() && s[i] == '/') {
          ++i;
          std::string n;
          if (!name(n)) return problem("bad closing tag");
          skip_ws();
          if (i >= s.size() || s[i] != '>') return problem("expected '>'");
          ++i;
          if (stack.empty() || stack.back() != n) return problem("mismatched </" + n + ">");
          stack.pop_back();
          continue;
        }
        if (stack.empty() && seen_root) return problem("second root element");
        std::string n;
        if (!name(n)) return problem("bad element name");
        std::set<std::string> attrs;
        while (true) {
          const auto before = i;
          skip_ws();
          if (i >= s.size()) return problem("unterminated tag");
          if (s[i] == '>' || (s[i] == '/' && i + 1 < s.size() && s[i + 1] == '>')) break;
          if (before == i) return problem("missing space before attribute");
          std::string a;
          if (!name(a)) return problem("bad attribute name");
          if (!attrs.insert(a).second) return problem("duplicate attribute " + a);
          skip_ws();
          if (i >= s.size() || s[i] != '=') return problem("expected '='");
          ++i;
          skip_ws();
          if (i >= s.size() || (s[i] != '"' && s[i] != '\'')) return problem("unquoted attribute");
          const char q = s[i++];
          while (i < s.size() && s[i] != q) {
            if (s[i] == '<') return problem("'<' in attribute");
            if (s[i] == '&') {
              if (!entity()) return problem("bad entity");
            } else {
              ++i;
            }
          }
          if (i >= s.size()) return problem("unterminated attribute");
          ++i;
        }
        seen_root = true;
        if (s[i] == '/') {
          i += 2;
        } else {
          ++i;
          stack.push_back(n);
        }
      } else {
        if (stack.empty()) return problem("text outside root");
        if (s[i] == '&') {
          if (!entity()) return problem("bad entity");
        } else {
          if (s[i] == '>' && i >= 2 && s.compare(i - 2, 2, "]]") == 0) return problem("']]>' in text");
          ++i;
        }
      }
    }
    if (!stack.empty()) return problem("unclosed <" + stack.back() + ">");
    if (!seen_root) return problem("no root element");
    return {};
  }
};

}  // namespace

std::string xml_problem(const std::string& xml) { return XmlChecker{xml}.run(); }

double ari_pair_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.size() != b.size()) throw std::runtime_error("length mismatch");
  // n11: together in both, n00: apart in both, n10/n01: together in only one.
  double n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const bool sa = a[i] == a[j], sb = b[i] == b[j];
      if (sa && sb) ++n11;
      else if (!sa && !sb) ++n00;
      else if (sa) ++n10;
      else ++n01;
    }
  const double den = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11);
  if (den == 0.0) return 1.0;
  return 2.0 * (n00 * n11 - n01 * n10) / den;
}

}  // namespace nf_test
