// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.
// Runs with the mock LLM and stub embeddings only.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <regex>
#include <set>
#include <sstream>

#include "narrativeforge/cli.hpp"
#include "narrativeforge/deck.hpp"
#include "narrativeforge/embedding.hpp"
#include "narrativeforge/engine.hpp"
#include "narrativeforge/error.hpp"
#include "narrativeforge/fsio.hpp"
#include "narrativeforge/llm.hpp"
#include "narrativeforge/rationale.hpp"
#include "narrativeforge/scoring.hpp"
#include "support.hpp"

using namespace narrativeforge;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("threw: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!o.pass) ++failures;
  std::ostringstream line;
  line.setf(std::ios::fixed);
  line.precision(3);
  line << (o.pass ? "PASS" : "FAIL") << "  " << name << "  (" << secs << " s)  " << o.detail;
  std::cout << line.str() << std::endl;
}

std::string sci(double v) {
  std::ostringstream s;
  s.setf(std::ios::scientific);
  s.precision(2);
  s << v;
  return s.str();
}

std::string fmt(double v, int precision = 4) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(precision);
  s << v;
  return s.str();
}

// Contingency-table ARI written independently of the library: explicit table,
// pair counts via n(n-1)/2, long double arithmetic.
double ari_contingency_oracle(const std::vector<int>& a, const std::vector<int>& b) {
  std::map<std::pair<int, int>, long long> table;
  std::map<int, long long> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ++table[{a[i], b[i]}];
    ++rows[a[i]];
    ++cols[b[i]];
  }
  auto c2 = [](long long n) { return static_cast<long double>(n) * (n - 1) / 2; };
  long double index = 0, sa = 0, sb = 0;
  for (const auto& [k, v] : table) index += c2(v);
  for (const auto& [k, v] : rows) sa += c2(v);
  for (const auto& [k, v] : cols) sb += c2(v);
  const long double expected = sa * sb / c2(static_cast<long long>(a.size()));
  const long double max_index = (sa + sb) / 2;
  if (max_index == expected) return 1.0;
  return static_cast<double>((index - expected) / (max_index - expected));
}

SelectionContext corpus12_ctx() {
  const auto corpus = parse_corpus_file(nf_test::read_fixture("corpus_12.json"));
  std::vector<std::string> ids;
  for (const auto& p : corpus.papers) ids.push_back(p.id);
  return build_selection_context(corpus, ids, "Human-centred interactive systems", "Prepare a job talk");
}

constexpr std::size_t kDim = 16;

std::vector<float> vec(const std::vector<std::pair<std::size_t, float>>& parts) {
  std::vector<float> v(kDim, 0.0f);
  for (auto [i, w] : parts) v[i] += w;
  return v;
}

void pin_papers(StubEmbedding& emb, const SelectionContext& ctx,
                const std::function<std::vector<float>(std::size_t)>& base) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<float> u(-0.05f, 0.05f);
  for (std::size_t i = 0; i < ctx.selected.size(); ++i) {
    auto v = base(i);
    for (std::size_t d = 10; d < kDim; ++d) v[d] += u(rng);
    emb.pin(paper_text(ctx.selected[i]), v);
  }
}

Perspective with_groups(FrameworkKind kind, const SelectionContext& ctx,
                        const std::vector<std::vector<std::size_t>>& groups) {
  auto p = nf_test::make_perspective(kind, groups.size(), ctx);
  for (std::size_t c = 0; c < groups.size(); ++c) {
    p.clusters[c].papers_assign.clear();
    for (auto i : groups[c]) p.clusters[c].papers_assign.push_back(ctx.selected[i].id);
  }
  return p;
}

Outcome ari_oracle() {
  const std::vector<int> a{1, 1, 2, 2}, b{1, 2, 1, 2};
  const double hand = adjusted_rand_index(a, b);
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng() % 7;
    const int ka = 1 + static_cast<int>(rng() % n), kb = 1 + static_cast<int>(rng() % n);
    std::vector<int> x(n), y(n);
    for (auto& v : x) v = static_cast<int>(rng() % ka);
    for (auto& v : y) v = static_cast<int>(rng() % kb);
    const double got = adjusted_rand_index(x, y);
    worst = std::max({worst, std::abs(got - ari_contingency_oracle(x, y)), std::abs(got - nf_test::ari_pair_oracle(x, y))});
  }
  return {std::abs(hand + 0.5) <= 1e-12 && worst <= 1e-12,
          "hand case " + fmt(hand, 12) + ", max |diff| over 200 pairs " + sci(worst) + " (<= 1e-12)"};
}

Outcome final_arithmetic() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const MetricTuple m{u(rng), u(rng), u(rng), u(rng), u(rng)};
    worst = std::max(worst, std::abs(final_score(m) - 0.2 * (m.sca + m.sc + m.ari + m.pcs + m.icc)));
  }
  bool unit_weights = true;
  for (int k = 0; k < 5; ++k) {
    MetricTuple m{};
    double* f[] = {&m.sca, &m.icc, &m.ari, &m.pcs, &m.sc};
    *f[k] = 1.0;
    unit_weights = unit_weights && final_score(m) == 0.2;
  }
  return {worst <= 1e-9 && unit_weights, "max |diff| over 1000 tuples " + sci(worst) +
                                             (unit_weights ? ", each weight 0.2" : ", weight mismatch")};
}

Outcome ranking_contract() {
  const auto ctx = corpus12_ctx();
  MockLlm llm(nf_test::fixture_dir() / "mock_llm");
  StubEmbedding emb;
  Scorer scorer(emb);
  bool ok = true;
  std::string detail;
  for (auto kind : kAllFrameworks) {
    const auto set = generate_candidates(ctx, kind, llm, scorer);
    const auto again = generate_candidates(ctx, kind, llm, scorer);
    const auto parsed = parse_topdown_response(
        nf_test::read_fixture("mock_llm/topdown_" + std::string(to_string(kind)) + ".txt"), ctx, framework_spec(kind));
    const auto expected = std::min<std::size_t>(4, parsed.perspectives.size());
    double min_kept = 2.0, max_excluded = -1.0;
    std::set<std::string> kept;
    for (const auto& c : set.candidates) {
      min_kept = std::min(min_kept, c.report.final);
      kept.insert(perspective_fingerprint(c.perspective));
    }
    for (const auto& p : parsed.perspectives)
      if (!kept.count(perspective_fingerprint(p))) max_excluded = std::max(max_excluded, scorer.score(p, ctx).final);
    const bool this_ok = set.candidates.size() == expected && set.survivors == parsed.perspectives.size() &&
                         min_kept >= max_excluded && json(set).dump() == json(again).dump();
    ok = ok && this_ok;
    detail += std::string(to_string(kind)) + " " + std::to_string(set.candidates.size()) + "/" +
              std::to_string(parsed.perspectives.size()) + (this_ok ? "" : " (bad)") + "; ";
  }
  return {ok, detail + "repeat runs byte-identical"};
}

Outcome planted_partition() {
  const auto ctx = nf_test::make_ctx(12);
  StubEmbedding emb(kDim);
  pin_papers(emb, ctx, [](std::size_t i) { return vec({{i % 3, 1.0f}}); });
  const double correct = ari_score(with_groups(FrameworkKind::parallel, ctx, {{0, 3, 6, 9}, {1, 4, 7, 10}, {2, 5, 8, 11}}),
                                   ctx, emb, 1);
  std::mt19937_64 rng(17);
  double mean = 0.0;
  const int shuffles = 100;
  for (int s = 0; s < shuffles; ++s) {
    std::vector<std::size_t> o(12);
    std::iota(o.begin(), o.end(), 0);
    std::shuffle(o.begin(), o.end(), rng);
    mean += ari_score(with_groups(FrameworkKind::parallel, ctx, {{o[0], o[1], o[2], o[3]}, {o[4], o[5], o[6], o[7]},
                                                                 {o[8], o[9], o[10], o[11]}}),
                      ctx, emb, 1) /
            shuffles;
  }
  return {correct >= 0.95 && mean >= 0.35 && mean <= 0.65,
          "correct " + fmt(correct) + " (>= 0.95), shuffled mean over " + std::to_string(shuffles) + " " + fmt(mean) +
              " (in [0.35, 0.65])"};
}

Outcome sc_ordering() {
  std::string detail;
  bool ok = true;
  {
    const auto ctx = nf_test::make_ctx(9);
    StubEmbedding emb(kDim);
    pin_papers(emb, ctx, [](std::size_t i) { return vec({{i % 3, 1.0f}}); });
    const double sep = sc_score(with_groups(FrameworkKind::parallel, ctx, {{0, 3, 6}, {1, 4, 7}, {2, 5, 8}}), ctx, emb);
    const double merged = sc_score(with_groups(FrameworkKind::parallel, ctx, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}}), ctx, emb);
    ok = ok && sep > merged;
    detail += "(a) " + fmt(sep) + " > " + fmt(merged) + "; ";
  }
  {
    const auto ctx = nf_test::make_ctx(10);
    StubEmbedding emb(kDim);
    pin_papers(emb, ctx, [](std::size_t i) {
      const double th = (i / 2) * 0.5;
      return vec({{0, static_cast<float>(std::cos(th))}, {1, static_cast<float>(std::sin(th))}});
    });
    const double chain =
        sc_score(with_groups(FrameworkKind::linear, ctx, {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}}), ctx, emb);
    const double shuffled =
        sc_score(with_groups(FrameworkKind::linear, ctx, {{0, 1}, {6, 7}, {4, 5}, {2, 3}, {8, 9}}), ctx, emb);
    ok = ok && chain > shuffled;
    detail += "(b) " + fmt(chain) + " > " + fmt(shuffled) + "; ";
  }
  {
    const auto ctx = nf_test::make_ctx(9);
    StubEmbedding near(kDim), far(kDim);
    pin_papers(near, ctx, [](std::size_t i) { return vec({{0, 1.0f}, {1 + i % 3, 0.3f}}); });
    pin_papers(far, ctx, [](std::size_t i) { return vec({{i % 3, 1.0f}}); });
    const auto p = with_groups(FrameworkKind::circular, ctx, {{0, 3, 6}, {1, 4, 7}, {2, 5, 8}});
    const double a = sc_score(p, ctx, near), b = sc_score(p, ctx, far);
    ok = ok && a > b;
    detail += "(c) " + fmt(a) + " > " + fmt(b) + "; ";
  }
  {
    const auto ctx = nf_test::make_ctx(8);
    StubEmbedding emb(kDim);
    const std::array<Quadrant, 4> q{Quadrant{Pole::a, Pole::a}, Quadrant{Pole::a, Pole::b}, Quadrant{Pole::b, Pole::a},
                                    Quadrant{Pole::b, Pole::b}};
    pin_papers(emb, ctx, [&](std::size_t i) {
      return vec({{0, q[i / 2].side1 == Pole::a ? 1.0f : -1.0f}, {1, q[i / 2].side2 == Pole::a ? 1.0f : -1.0f}});
    });
    auto p = with_groups(FrameworkKind::coordinate, ctx, {{0, 1}, {2, 3}, {4, 5}, {6, 7}});
    emb.pin(p.axes->axis1.pole_a, vec({{0, 1.0f}}));
    emb.pin(p.axes->axis1.pole_b, vec({{0, -1.0f}}));
    emb.pin(p.axes->axis2.pole_a, vec({{1, 1.0f}}));
    emb.pin(p.axes->axis2.pole_b, vec({{1, -1.0f}}));
    for (std::size_t c = 0; c < 4; ++c) p.axes->quadrant_of[c] = q[c];
    const double correct = sc_score(p, ctx, emb);
    double best_other = -1.0;
    std::array<std::size_t, 4> perm{0, 1, 2, 3};
    while (std::next_permutation(perm.begin(), perm.end())) {
      auto r = p;
      for (std::size_t c = 0; c < 4; ++c) r.axes->quadrant_of[c] = q[perm[c]];
      best_other = std::max(best_other, sc_score(r, ctx, emb));
    }
    ok = ok && correct > best_other;
    detail += "(d) " + fmt(correct) + " > max of 23 permutations " + fmt(best_other);
  }
  return {ok, detail};
}

Outcome lock_fuzz() {
  std::mt19937_64 rng(4242);
  int trials = 0, applied = 0, no_ops = 0, refused = 0, violations = 0;
  for (; trials < 500; ++trials) {
    const std::size_t n = 6 + rng() % 9;
    const auto ctx = nf_test::make_ctx(n);
    auto p = nf_test::make_perspective(kAllFrameworks[rng() % 4], 3 + rng() % 2, ctx);
    std::vector<FieldKey> keys{FieldKey::statement()};
    for (std::size_t c = 0; c < p.clusters.size(); ++c) {
      keys.push_back(FieldKey::theme(c));
      keys.push_back(FieldKey::assignment(c));
    }
    for (const auto& k : keys)
      if (rng() % 3 == 0) p.locks.insert(k);
    const auto target = keys[rng() % keys.size()];

    std::vector<std::string> script;
    if (target.is_text()) {
      script = {rng() % 4 == 0 ? std::get<std::string>(field_value(p, target)) : "Edit " + std::to_string(trials)};
    } else {
      auto list = p.clusters[target.index].papers_assign;
      switch (rng() % 3) {
        case 0: std::reverse(list.begin(), list.end()); break;
        case 1: list.pop_back(); break;  // breaks the partition
        default: std::rotate(list.begin(), list.begin() + 1, list.end()); break;
      }
      script = {json(list).dump()};
    }
    ScriptedLlm llm(script);
    try {
      const auto out = request_partial_update(p, target, ctx, llm);
      bool ok = !p.is_locked(target);
      for (const auto& k : keys)
        if (!(k == target) && p.is_locked(k)) ok = ok && field_value(out.perspective, k) == field_value(p, k);
      ok = ok && (out.no_op || field_value(out.perspective, target) != field_value(p, target));
      ok = ok && validate_perspective(out.perspective, ctx).ok() && out.perspective.locks == p.locks;
      if (!ok) ++violations;
      out.no_op ? ++no_ops : ++applied;
    } catch (const Error& e) {
      const bool expected = (e.code() == ErrorCode::lock_violation && p.is_locked(target) && llm.calls() == 0) ||
                            (e.code() == ErrorCode::update && !target.is_text());
      if (!expected) ++violations;
      ++refused;
    }
  }
  return {violations == 0 && applied > 100,
          std::to_string(trials) + " trials: " + std::to_string(applied) + " applied, " + std::to_string(no_ops) +
              " no-op, " + std::to_string(refused) + " refused, " + std::to_string(violations) + " violations"};
}

Outcome prompt_fidelity() {
  const auto ctx = corpus12_ctx();
  const auto top = build_topdown_prompt(ctx, framework_spec(FrameworkKind::linear));
  std::vector<std::string> missing;
  for (const auto* s : {"# DATA & CONTEXT", "# KEY CONCEPTS", "# INSTRUCTIONS", "## Step 1", "## Step 2", "## Step 3",
                        "# OUTPUT FORMAT", "contribution_statement", "cluster_theme", "papers_assign", "3 to 6", "4 to 6"})
    if (top.find(s) == std::string::npos) missing.push_back(std::string("top-down: ") + s);
  const auto p = nf_test::make_perspective(FrameworkKind::linear, 3, nf_test::make_ctx(9));
  const auto bottom = build_bottomup_prompt(p, FieldKey::theme(1), nf_test::make_ctx(9));
  for (const auto* s : {"key_to_modify", "Return only the new value"})
    if (bottom.find(s) == std::string::npos) missing.push_back(std::string("bottom-up: ") + s);
  std::string detail = missing.empty() ? "all skeleton markers present" : "missing:";
  for (const auto& m : missing) detail += " [" + m + "]";
  return {missing.empty(), detail};
}

Outcome schema_invariants() {
  const auto ctx = corpus12_ctx();
  std::size_t emitted = 0, dropped = 0;
  std::set<std::string> reasons_seen;
  bool ok = true;
  for (auto kind : kAllFrameworks) {
    const auto parsed = parse_topdown_response(
        nf_test::read_fixture("mock_llm/topdown_" + std::string(to_string(kind)) + ".txt"), ctx, framework_spec(kind));
    for (const auto& p : parsed.perspectives) {
      ++emitted;
      ok = ok && validate_perspective(p, ctx).ok() && check_structure(p).ok();
    }
    for (const auto& d : parsed.dropped) {
      ++dropped;
      ok = ok && !d.reasons.empty();
      for (const auto& r : d.reasons)
        for (const auto* tag : {"unknown id", "doubly-assigned", "axes required"})
          if (r.find(tag) != std::string::npos) reasons_seen.insert(tag);
    }
  }
  ok = ok && reasons_seen.size() == 3;
  return {ok, std::to_string(emitted) + " emitted, all valid; " + std::to_string(dropped) +
                  " poisoned dropped (reasons seen: " + std::to_string(reasons_seen.size()) + "/3)"};
}

Outcome catalog_constants() {
  std::map<FrameworkKind, Prevalence> prev;
  for (const auto& s : framework_catalog()) prev[s.kind] = s.prevalence;
  std::map<RhetoricalMode, int> modes;
  for (const auto& s : strategy_catalog()) ++modes[s.category];
  const bool ok = prev[FrameworkKind::parallel].count == 43 && prev[FrameworkKind::linear].count == 5 &&
                  prev[FrameworkKind::coordinate].count == 4 && prev[FrameworkKind::circular].count == 1 &&
                  prev[FrameworkKind::parallel].total == 53 && prev[FrameworkKind::circular].total == 53 &&
                  modes[RhetoricalMode::ethos] == 3 && modes[RhetoricalMode::pathos] == 4 &&
                  modes[RhetoricalMode::logos] == 4 && strategy_catalog().size() == 11;
  return {ok, "prevalence 43/5/4/1 of 53; strategies ethos " + std::to_string(modes[RhetoricalMode::ethos]) +
                  ", pathos " + std::to_string(modes[RhetoricalMode::pathos]) + ", logos " +
                  std::to_string(modes[RhetoricalMode::logos]) + ", total " + std::to_string(strategy_catalog().size())};
}

Outcome deck_export() {
  const auto t0 = Clock::now();
  const auto dir = nf_test::temp_dir("acceptance_cli");
  auto cli = [&](std::vector<std::string> args) {
    std::vector<std::string> full{"--store", dir.string(), "--mock-llm", (nf_test::fixture_dir() / "mock_llm").string(),
                                  "--stub-embeddings", "--seed", "1"};
    full.insert(full.end(), args.begin(), args.end());
    std::ostringstream out, err;
    const int code = run_cli(full, out, err);
    if (code != 0) throw std::runtime_error("cli failed: " + err.str());
  };
  cli({"ingest", (nf_test::fixture_dir() / "corpus_12.json").string()});
  cli({"generate", "--framework", "linear", "--out", (dir / "candidates.json").string()});
  cli({"score"});
  cli({"rationale", "--strategy", strategy_catalog().front().name});
  cli({"export", "--pptx", (dir / "deck.pptx").string()});
  const double e2e = std::chrono::duration<double>(Clock::now() - t0).count();

  const auto deck_bytes = read_file((dir / "deck.json").string());
  const auto deck = parse_deck_json(deck_bytes);
  const bool stable = export_deck_json(deck) == deck_bytes;

  const auto parts = nf_test::read_zip(read_file((dir / "deck.pptx").string()));
  std::size_t slide_parts = 0, xml_bad = 0;
  const std::regex slide_re(R"(^ppt/slides/slide\d+\.xml$)");
  for (const auto& [name, data] : parts) {
    if (std::regex_match(name, slide_re)) ++slide_parts;
    if (name.ends_with(".xml") || name.ends_with(".rels"))
      if (!nf_test::xml_problem(data).empty()) ++xml_bad;
  }

  std::set<SlideLayout> layouts;
  bool bijective = true;
  for (auto kind : kAllFrameworks) {
    bijective = bijective && layouts.insert(layout_for(kind)).second && framework_for(layout_for(kind)) == kind;
  }

  const bool ok = stable && xml_bad == 0 && parts.count("[Content_Types].xml") && slide_parts == deck.slides.size() &&
                  bijective && e2e < 60.0;
  return {ok, std::string("json round trip ") + (stable ? "stable" : "UNSTABLE") + "; " + std::to_string(parts.size()) +
                  " parts, " + std::to_string(xml_bad) + " malformed; " + std::to_string(slide_parts) +
                  " slide parts for " + std::to_string(deck.slides.size()) + " slides; layout map " +
                  (bijective ? "bijective" : "NOT bijective") + "; CLI run " + fmt(e2e, 2) + " s (< 60)"};
}

Outcome timed(const std::function<Outcome()>& f, double limit) {
  const auto t0 = Clock::now();
  auto o = f();
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (secs >= limit) {
    o.pass = false;
    o.detail += "; took " + fmt(secs, 2) + " s, limit " + fmt(limit, 0) + " s";
  }
  return o;
}

}  // namespace

int main() {
  run("ARI oracle equivalence", [] { return timed(ari_oracle, 5.0); });
  run("FinalScore arithmetic", final_arithmetic);
  run("Ranking contract", ranking_contract);
  run("Planted-partition recovery", [] { return timed(planted_partition, 10.0); });
  run("SC ordering properties", sc_ordering);
  run("Lock preservation fuzz", lock_fuzz);
  run("Prompt fidelity snapshots", prompt_fidelity);
  run("Schema invariant suite", schema_invariants);
  run("Catalog constants", catalog_constants);
  run("Deck export", deck_export);
  std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " criteria failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
