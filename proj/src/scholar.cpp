#include <httplib.h>

#include <regex>
#include <set>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

namespace {

std::string decode_entities(std::string s) {
  static const std::pair<const char*, const char*> table[] = {
      {"&amp;", "&"}, {"&lt;", "<"},   {"&gt;", ">"},    {"&quot;", "\""},
      {"&#39;", "'"}, {"&#x27;", "'"}, {"&nbsp;", " "}, {"&hellip;", "..."},
  };
  for (const auto& [from, to] : table) {
    std::string::size_type pos = 0;
    const std::string f(from);
    while ((pos = s.find(f, pos)) != std::string::npos) {
      s.replace(pos, f.size(), to);
      pos += std::char_traits<char>::length(to);
    }
  }
  return s;
}

std::string strip_tags(const std::string& html) {
  static const std::regex tag_re("<[^>]*>");
  return text::normalize_whitespace(decode_entities(std::regex_replace(html, tag_re, " ")));
}

struct UrlParts {
  std::string origin;  // scheme://host[:port]
};

UrlParts split_url(const std::string& url) {
  static const std::regex url_re(R"(^(https?://[A-Za-z0-9.\-]+(:\d+)?)(/[^\s]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, url_re))
    fail(ErrorCode::validation, "not a valid http(s) URL: '" + url + "'");
  return {m[1].str()};
}

struct ProfileRow {
  std::string href;
  std::string title;
  std::string authors;
  std::string venue;
  std::optional<int> year;
};

std::vector<ProfileRow> extract_rows(const std::string& page) {
  static const std::regex link_re(R"re(<a[^>]*href="([^"]*)"[^>]*class="gsc_a_at"[^>]*>([\s\S]*?)</a>)re");
  static const std::regex gray_re(R"re(<div class="gs_gray">([\s\S]*?)</div>)re");
  static const std::regex year_re(R"re(<span class="gsc_a_h[^"]*">\s*(\d{4})\s*</span>)re");
  static const std::regex trailing_year_re(R"(,\s*\d{4}\s*$)");

  std::vector<ProfileRow> rows;
  const std::string marker = "<tr class=\"gsc_a_tr\"";
  auto pos = page.find(marker);
  while (pos != std::string::npos) {
    const auto next = page.find(marker, pos + marker.size());
    const auto end = page.find("</tr>", pos);
    const auto stop = std::min(next, end == std::string::npos ? page.size() : end);
    const std::string row = page.substr(pos, stop - pos);
    pos = next;

    std::smatch m;
    if (!std::regex_search(row, m, link_re)) continue;
    ProfileRow r;
    r.href = decode_entities(m[1].str());
    r.title = strip_tags(m[2].str());
    std::vector<std::string> gray;
    for (auto it = std::sregex_iterator(row.begin(), row.end(), gray_re); it != std::sregex_iterator(); ++it)
      gray.push_back(strip_tags((*it)[1].str()));
    if (!gray.empty()) r.authors = gray[0];
    if (gray.size() > 1) r.venue = text::trim(std::regex_replace(gray[1], trailing_year_re, ""));
    if (std::regex_search(row, m, year_re)) r.year = std::stoi(m[1].str());
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string publication_id(const ProfileRow& row) {
  static const std::regex id_re(R"(citation_for_view=([^&"]+))");
  std::smatch m;
  if (std::regex_search(row.href, m, id_re)) return m[1].str();
  return "t" + text::hex64(text::fnv1a64(row.title));
}

std::string citation_string(const ProfileRow& row) {
  std::string out = row.authors;
  auto append = [&](const std::string& part) {
    if (part.empty()) return;
    if (!out.empty()) out += ". ";
    out += part;
  };
  append(row.title);
  append(row.venue);
  if (row.year) append(std::to_string(*row.year));
  return out;
}

std::optional<std::string> extract_description(const std::string& page) {
  static const std::regex descr_re(R"re(<div[^>]*id="gsc_oci_descr"[^>]*>([\s\S]*?)</div>\s*</div>\s*</div>)re");
  static const std::regex descr_loose_re(R"re(<div[^>]*id="gsc_oci_descr"[^>]*>([\s\S]*?)</div>)re");
  std::smatch m;
  if (std::regex_search(page, m, descr_re) || std::regex_search(page, m, descr_loose_re)) {
    auto d = strip_tags(m[1].str());
    if (!d.empty()) return d;
  }
  return std::nullopt;
}

}  // namespace

HttpResponse HttplibFetcher::get(const std::string& url) {
  static const std::regex url_re(R"(^(https?://[^/]+)(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, url_re)) fail(ErrorCode::validation, "not a valid http(s) URL: '" + url + "'");
  httplib::Client client(m[1].str());
  client.set_follow_location(true);
  client.set_read_timeout(30, 0);
  const auto path = m[2].matched ? m[2].str() : std::string("/");
  auto res = client.Get(path);
  if (!res)
    throw Error(ErrorCode::transport, "request to " + url + " failed: " + httplib::to_string(res.error()),
                /*retryable=*/true);
  return {res->status, res->body};
}

Corpus fetch_scholar_profile(const std::string& url, HttpFetcher& transport) {
  const auto parts = split_url(url);
  const auto profile = transport.get(url);
  if (profile.status != 200)
    fail(ErrorCode::extraction, "profile page returned HTTP " + std::to_string(profile.status));
  if (profile.body.find("gsc_a_b") == std::string::npos)
    fail(ErrorCode::extraction, "page does not look like a scholar profile (no publication table)");

  const auto rows = extract_rows(profile.body);
  if (rows.empty()) fail(ErrorCode::empty_profile, "scholar profile lists no publications");

  Corpus corpus;
  corpus.source = CorpusSource::scholar_profile;
  std::set<std::string> seen;
  for (const auto& row : rows) {
    if (row.title.empty()) {
      corpus.warnings.push_back("skipped a profile row without a title");
      continue;
    }
    PaperRecord p;
    p.id = publication_id(row);
    if (!seen.insert(p.id).second) {
      corpus.warnings.push_back("skipped duplicate publication '" + p.id + "'");
      continue;
    }
    p.title = row.title;
    p.citation = citation_string(row);
    p.year = row.year;
    if (!row.venue.empty()) p.venue = row.venue;

    const auto detail_url = row.href.rfind("http", 0) == 0 ? row.href : parts.origin + row.href;
    std::optional<std::string> description;
    try {
      const auto detail = transport.get(detail_url);
      if (detail.status == 200) description = extract_description(detail.body);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::transport) throw;
    }
    if (description) {
      p.abstract_text = *description;
    } else {
      corpus.warnings.push_back("paper '" + p.id + "' has no abstract on its detail page");
    }
    corpus.papers.push_back(std::move(p));
  }
  return corpus;
}

}  // namespace narrativeforge
