#include "narrativeforge/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "narrativeforge/error.hpp"

namespace narrativeforge {

using kernels::Matrix;
using nlohmann::json;

double cosine_similarity(std::span<const float> u, std::span<const float> v) {
  if (u.size() != v.size()) fail(ErrorCode::embedding, "cosine of vectors with different dimensions");
  double uv = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    uv += static_cast<double>(u[i]) * v[i];
    uu += static_cast<double>(u[i]) * u[i];
    vv += static_cast<double>(v[i]) * v[i];
  }
  if (uu == 0.0 || vv == 0.0) fail(ErrorCode::embedding, "cosine of a zero vector");
  const double c = uv / (std::sqrt(uu) * std::sqrt(vv));
  return std::clamp(c, -1.0, 1.0);
}

double unit_map(double cosine) { return std::clamp((cosine + 1.0) / 2.0, 0.0, 1.0); }

namespace {

double clamp01(double x) { return std::clamp(x, 0.0, 1.0); }

double cos_d(const Embedding& a, const Embedding& b) { return cosine_similarity(a, b); }

double mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return kernels::ordered_sum(v) / static_cast<double>(v.size());
}

}  // namespace

PerspectiveEmbeddings embed_perspective(const Perspective& p, const SelectionContext& ctx,
                                        EmbeddingProvider& emb) {
  std::vector<std::string> texts;
  texts.push_back(p.contribution_statement);
  for (const auto& c : p.clusters) texts.push_back(c.cluster_theme);
  for (const auto& c : p.clusters) {
    for (const auto& id : c.papers_assign) {
      const auto* paper = ctx.find(id);
      if (!paper) fail(ErrorCode::validation, "cannot score: unknown id: " + id);
      texts.push_back(paper_text(*paper));
    }
  }
  if (p.axes) {
    texts.push_back(p.axes->axis1.pole_a);
    texts.push_back(p.axes->axis1.pole_b);
    texts.push_back(p.axes->axis2.pole_a);
    texts.push_back(p.axes->axis2.pole_b);
  }

  auto vecs = emb.embed(texts);
  if (vecs.size() != texts.size()) fail(ErrorCode::embedding, "embedding provider returned wrong count");

  PerspectiveEmbeddings e;
  std::size_t at = 0;
  e.statement = std::move(vecs[at++]);
  for (std::size_t i = 0; i < p.clusters.size(); ++i) e.themes.push_back(std::move(vecs[at++]));
  for (const auto& c : p.clusters) {
    auto& members = e.papers.emplace_back();
    for (std::size_t k = 0; k < c.papers_assign.size(); ++k) members.push_back(std::move(vecs[at++]));
  }
  if (p.axes) {
    e.poles = std::array<Embedding, 4>{std::move(vecs[at]), std::move(vecs[at + 1]), std::move(vecs[at + 2]),
                                       std::move(vecs[at + 3])};
  }
  return e;
}

double sca_score(const PerspectiveEmbeddings& e) {
  std::vector<double> vals;
  for (const auto& theme : e.themes) vals.push_back(unit_map(cos_d(e.statement, theme)));
  return clamp01(mean(vals));
}

namespace {

double cluster_cohesion(const std::vector<Embedding>& members) {
  if (members.size() < 2) return 1.0;
  std::vector<double> vals;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) vals.push_back(unit_map(cos_d(members[i], members[j])));
  return mean(vals);
}

double cluster_paper_similarity(const std::vector<Embedding>& members, const Embedding& theme) {
  std::vector<double> vals;
  for (const auto& m : members) vals.push_back(unit_map(cos_d(m, theme)));
  return mean(vals);
}

}  // namespace

double icc_score(const PerspectiveEmbeddings& e) {
  std::vector<double> vals;
  for (const auto& members : e.papers) vals.push_back(cluster_cohesion(members));
  return clamp01(mean(vals));
}

double pcs_score(const PerspectiveEmbeddings& e) {
  std::vector<double> vals;
  for (std::size_t c = 0; c < e.papers.size(); ++c)
    for (const auto& m : e.papers[c]) vals.push_back(unit_map(cos_d(m, e.themes[c])));
  return clamp01(mean(vals));
}

double sca_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb) {
  return sca_score(embed_perspective(p, ctx, emb));
}
double icc_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb) {
  return icc_score(embed_perspective(p, ctx, emb));
}
double pcs_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb) {
  return pcs_score(embed_perspective(p, ctx, emb));
}

// ---------------------------------------------------------------------------
// k-means

namespace {

struct Rng {
  std::uint64_t state;
  std::uint64_t next() {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

Matrix plus_plus_init(const Matrix& points, std::size_t k, Rng& rng) {
  const auto n = points.rows;
  Matrix centroids(k, points.cols);
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  std::vector<bool> chosen(n, false);

  auto take = [&](std::size_t c, std::size_t idx) {
    chosen[idx] = true;
    std::copy(points.row(idx).begin(), points.row(idx).end(), centroids.row(c).begin());
    for (std::size_t i = 0; i < n; ++i) d2[i] = std::min(d2[i], kernels::squared_distance(points.row(i), points.row(idx)));
  };

  take(0, std::min(n - 1, static_cast<std::size_t>(rng.uniform() * static_cast<double>(n))));
  for (std::size_t c = 1; c < k; ++c) {
    const double total = kernels::ordered_sum(d2);
    std::size_t pick = n;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        acc += d2[i];
        pick = i;
        if (acc > r) break;
      }
    }
    if (pick == n) {
      // All remaining mass is zero (duplicate points): take the first unchosen point.
      pick = 0;
      while (pick < n && chosen[pick]) ++pick;
      if (pick == n) pick = 0;
    }
    take(c, pick);
  }
  return centroids;
}

KMeansResult lloyd(const Matrix& points, std::size_t k, std::uint64_t stream_seed, Execution exec) {
  constexpr int kMaxIterations = 100;
  Rng rng{stream_seed};
  Matrix centroids = plus_plus_init(points, k, rng);
  std::vector<int> labels(points.rows, -1);
  kernels::Assignment asg;

  for (int iter = 0; iter < kMaxIterations; ++iter) {
    asg = kernels::assign_nearest(points, centroids, exec);

    // Refill empty clusters with the point farthest from its centroid.
    std::vector<std::size_t> counts(k, 0);
    for (int l : asg.labels) ++counts[static_cast<std::size_t>(l)];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.rows; ++i) {
        if (counts[static_cast<std::size_t>(asg.labels[i])] > 1 && asg.distance2[i] > far_d) {
          far_d = asg.distance2[i];
          far = i;
        }
      }
      if (far_d < 0.0) continue;
      --counts[static_cast<std::size_t>(asg.labels[far])];
      asg.labels[far] = static_cast<int>(c);
      asg.distance2[far] = 0.0;
      counts[c] = 1;
      std::copy(points.row(far).begin(), points.row(far).end(), centroids.row(c).begin());
    }

    const bool converged = asg.labels == labels;
    labels = asg.labels;
    if (converged) break;

    Matrix next(k, points.cols);
    for (std::size_t i = 0; i < points.rows; ++i) {
      auto dst = next.row(static_cast<std::size_t>(labels[i]));
      auto src = points.row(i);
      for (std::size_t d = 0; d < points.cols; ++d) dst[d] += src[d];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        std::copy(centroids.row(c).begin(), centroids.row(c).end(), next.row(c).begin());
        continue;
      }
      for (auto& x : next.row(c)) x /= static_cast<double>(counts[c]);
    }
    centroids = std::move(next);
  }

  // SSE against the final centroids.
  std::vector<double> d2(points.rows);
  for (std::size_t i = 0; i < points.rows; ++i)
    d2[i] = kernels::squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
  return KMeansResult{labels, kernels::ordered_sum(d2), std::move(centroids), 0};
}

std::uint64_t restart_seed(std::uint64_t seed, std::size_t restart) {
  Rng mix{seed ^ (0xa0761d6478bd642fULL * (restart + 1))};
  return mix.next();
}

}  // namespace

KMeansResult kmeans_cluster(const std::vector<Embedding>& vectors, std::size_t k, std::uint64_t seed,
                            std::size_t restarts, Execution exec) {
  if (k < 1) fail(ErrorCode::validation, "k-means needs k >= 1");
  if (k > vectors.size())
    fail(ErrorCode::validation, "k-means needs k <= n (k=" + std::to_string(k) +
                                    ", n=" + std::to_string(vectors.size()) + ")");
  const Matrix points = kernels::to_matrix(vectors);
  const std::size_t runs = std::max<std::size_t>(1, restarts);
  std::vector<KMeansResult> results(runs);

  const auto r_count = static_cast<long long>(runs);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long r = 0; r < r_count; ++r)
      results[static_cast<std::size_t>(r)] =
          lloyd(points, k, restart_seed(seed, static_cast<std::size_t>(r)), Execution::serial);
  } else {
    for (long long r = 0; r < r_count; ++r)
      results[static_cast<std::size_t>(r)] =
          lloyd(points, k, restart_seed(seed, static_cast<std::size_t>(r)), Execution::serial);
  }

  std::size_t best = 0;
  for (std::size_t r = 1; r < runs; ++r)
    if (results[r].sse < results[best].sse) best = r;
  auto out = std::move(results[best]);
  out.best_restart = best;
  return out;
}

// ---------------------------------------------------------------------------
// ARI

namespace {

double choose2(double n) { return n * (n - 1.0) / 2.0; }

}  // namespace

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) fail(ErrorCode::validation, "ARI needs label vectors of equal length");
  if (a.size() < 2) fail(ErrorCode::validation, "ARI needs at least two items");

  std::map<std::pair<int, int>, double> cells;
  std::map<int, double> rows, cols;
  for (std::size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1.0;
    rows[a[i]] += 1.0;
    cols[b[i]] += 1.0;
  }
  double index = 0.0, sum_rows = 0.0, sum_cols = 0.0;
  for (const auto& [_, n] : cells) index += choose2(n);
  for (const auto& [_, n] : rows) sum_rows += choose2(n);
  for (const auto& [_, n] : cols) sum_cols += choose2(n);
  const double total = choose2(static_cast<double>(a.size()));
  const double expected = sum_rows * sum_cols / total;
  const double max_index = 0.5 * (sum_rows + sum_cols);
  if (max_index == expected) return 1.0;
  return (index - expected) / (max_index - expected);
}

AriDetails ari_details(const PerspectiveEmbeddings& e, const ScoringOptions& options) {
  AriDetails d;
  std::vector<Embedding> vectors;
  for (std::size_t c = 0; c < e.papers.size(); ++c) {
    for (const auto& v : e.papers[c]) {
      vectors.push_back(v);
      d.assignment_labels.push_back(static_cast<int>(c));
    }
  }
  const auto k = e.papers.size();
  if (vectors.size() < k) fail(ErrorCode::validation, "ARI needs at least as many papers as clusters");
  auto km = kmeans_cluster(vectors, k, options.seed, options.restarts, options.execution);
  d.kmeans_labels = std::move(km.labels);
  d.kmeans_sse = km.sse;
  d.raw = vectors.size() < 2 ? 1.0 : adjusted_rand_index(d.assignment_labels, d.kmeans_labels);
  d.normalized = clamp01((d.raw + 1.0) / 2.0);
  return d;
}

double ari_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb, std::uint64_t seed) {
  ScoringOptions options;
  options.seed = seed;
  return ari_details(embed_perspective(p, ctx, emb), options).normalized;
}

// ---------------------------------------------------------------------------
// Structural consistency

std::vector<Embedding> cluster_centroids(const PerspectiveEmbeddings& e) {
  std::vector<Embedding> out;
  for (const auto& members : e.papers) {
    std::vector<double> acc(members.empty() ? 0 : members.front().size(), 0.0);
    for (const auto& m : members)
      for (std::size_t d = 0; d < acc.size(); ++d) acc[d] += m[d];
    double norm = 0.0;
    for (double x : acc) norm += x * x;
    norm = std::sqrt(norm);
    Embedding c(acc.size(), 0.0f);
    if (norm > 0.0)
      for (std::size_t d = 0; d < acc.size(); ++d) c[d] = static_cast<float>(acc[d] / norm);
    out.push_back(std::move(c));
  }
  return out;
}

namespace {

Matrix cluster_vectors(const PerspectiveEmbeddings& e, ScVariant variant) {
  return kernels::to_matrix(variant == ScVariant::theme ? e.themes : cluster_centroids(e));
}

double mean_pairwise_unit(const Matrix& cos) {
  std::vector<double> vals;
  for (std::size_t i = 0; i < cos.rows; ++i)
    for (std::size_t j = i + 1; j < cos.rows; ++j) vals.push_back(unit_map(cos.at(i, j)));
  return vals.empty() ? 0.0 : mean(vals);
}

double orderedness(const Matrix& cos) {
  const auto n = cos.rows;
  if (n < 3) return 1.0;
  std::size_t ok = 0, total = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      for (std::size_t k = j + 1; k < n; ++k) {
        ++total;
        if (cos.at(i, j) >= cos.at(i, k)) ++ok;
      }
  return static_cast<double>(ok) / static_cast<double>(total);
}

double axis_separability(const Perspective& p, const Matrix& vecs, const std::array<Embedding, 4>& poles) {
  const Matrix pole_m = kernels::to_matrix({poles[0], poles[1], poles[2], poles[3]});
  double sum_axes = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    std::vector<double> vals;
    for (std::size_t c = 0; c < vecs.rows; ++c) {
      const auto& q = p.axes->quadrant_of.at(c);
      const Pole side = axis == 0 ? q.side1 : q.side2;
      const std::size_t assigned = static_cast<std::size_t>(axis * 2 + (side == Pole::a ? 0 : 1));
      const std::size_t opposite = static_cast<std::size_t>(axis * 2 + (side == Pole::a ? 1 : 0));
      const double margin = unit_map(kernels::safe_cosine(vecs.row(c), pole_m.row(assigned))) -
                            unit_map(kernels::safe_cosine(vecs.row(c), pole_m.row(opposite)));
      vals.push_back(margin * 0.5 + 0.5);
    }
    sum_axes += mean(vals);
  }
  return sum_axes / 2.0;
}

}  // namespace

double sc_score(const Perspective& p, const PerspectiveEmbeddings& e, ScVariant variant) {
  const Matrix vecs = cluster_vectors(e, variant);
  switch (p.framework) {
    case FrameworkKind::parallel:
      return clamp01(1.0 - mean_pairwise_unit(kernels::pairwise_cosine(vecs)));
    case FrameworkKind::linear:
      return clamp01(orderedness(kernels::pairwise_cosine(vecs)));
    case FrameworkKind::circular:
      return clamp01(mean_pairwise_unit(kernels::pairwise_cosine(vecs)));
    case FrameworkKind::coordinate:
      if (!p.axes || !e.poles) fail(ErrorCode::validation, "coordinate structure score needs axes");
      for (std::size_t c = 0; c < p.clusters.size(); ++c)
        if (!p.axes->quadrant_of.count(c))
          fail(ErrorCode::validation, "missing quadrant: cluster " + std::to_string(c));
      return clamp01(axis_separability(p, vecs, *e.poles));
  }
  return 0.0;
}

double sc_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb, ScVariant variant) {
  return sc_score(p, embed_perspective(p, ctx, emb), variant);
}

double final_score(const MetricTuple& m) {
  for (double v : {m.sca, m.icc, m.ari, m.pcs, m.sc}) {
    if (!(v >= 0.0 && v <= 1.0)) fail(ErrorCode::validation, "metric outside [0, 1]: " + std::to_string(v));
  }
  return 0.2 * m.sca + 0.2 * m.sc + 0.2 * m.ari + 0.2 * m.pcs + 0.2 * m.icc;
}

void to_json(json& j, const ScoreReport& r) {
  const auto& d = r.details;
  j = json{{"sca", r.sca},
           {"icc", r.icc},
           {"ari", r.ari},
           {"pcs", r.pcs},
           {"sc", r.sc},
           {"final", r.final},
           {"details",
            {{"raw_ari", d.raw_ari},
             {"assignment_labels", d.assignment_labels},
             {"kmeans_labels", d.kmeans_labels},
             {"kmeans_sse", d.kmeans_sse},
             {"statement_theme_cosine", d.statement_theme_cosine},
             {"cluster_icc", d.cluster_icc},
             {"cluster_pcs", d.cluster_pcs},
             {"centroids", d.centroids},
             {"centroid_cosine", d.centroid_cosine},
             {"sc_variant", d.sc_variant},
             {"sc_kind", d.sc_kind}}}};
}

void from_json(const json& j, ScoreReport& r) {
  r.sca = j.at("sca").get<double>();
  r.icc = j.at("icc").get<double>();
  r.ari = j.at("ari").get<double>();
  r.pcs = j.at("pcs").get<double>();
  r.sc = j.at("sc").get<double>();
  r.final = j.at("final").get<double>();
  if (!j.contains("details")) return;
  const auto& d = j["details"];
  r.details.raw_ari = d.value("raw_ari", 0.0);
  r.details.assignment_labels = d.value("assignment_labels", std::vector<int>{});
  r.details.kmeans_labels = d.value("kmeans_labels", std::vector<int>{});
  r.details.kmeans_sse = d.value("kmeans_sse", 0.0);
  r.details.statement_theme_cosine = d.value("statement_theme_cosine", std::vector<double>{});
  r.details.cluster_icc = d.value("cluster_icc", std::vector<double>{});
  r.details.cluster_pcs = d.value("cluster_pcs", std::vector<double>{});
  r.details.centroids = d.value("centroids", std::vector<std::vector<double>>{});
  r.details.centroid_cosine = d.value("centroid_cosine", std::vector<std::vector<double>>{});
  r.details.sc_variant = d.value("sc_variant", std::string{});
  r.details.sc_kind = d.value("sc_kind", std::string{});
}

namespace {

std::string_view sc_kind_name(FrameworkKind k) {
  switch (k) {
    case FrameworkKind::parallel: return "cluster_separability";
    case FrameworkKind::linear: return "cluster_orderedness";
    case FrameworkKind::coordinate: return "axis_separability";
    case FrameworkKind::circular: return "cluster_interdependence";
  }
  return "";
}

}  // namespace

ScoreReport Scorer::score(const Perspective& p, const SelectionContext& ctx) const {
  const auto e = embed_perspective(p, ctx, embeddings_);
  ScoreReport r;
  r.sca = sca_score(e);
  r.icc = icc_score(e);
  r.pcs = pcs_score(e);
  const auto ari = ari_details(e, options_);
  r.ari = ari.normalized;
  r.sc = sc_score(p, e, options_.sc_variant);
  r.final = final_score({r.sca, r.icc, r.ari, r.pcs, r.sc});

  auto& d = r.details;
  d.raw_ari = ari.raw;
  d.assignment_labels = ari.assignment_labels;
  d.kmeans_labels = ari.kmeans_labels;
  d.kmeans_sse = ari.kmeans_sse;
  for (std::size_t c = 0; c < e.themes.size(); ++c) {
    d.statement_theme_cosine.push_back(cos_d(e.statement, e.themes[c]));
    d.cluster_icc.push_back(cluster_cohesion(e.papers[c]));
    d.cluster_pcs.push_back(cluster_paper_similarity(e.papers[c], e.themes[c]));
  }
  const auto centroids = cluster_centroids(e);
  for (const auto& c : centroids) d.centroids.emplace_back(c.begin(), c.end());
  const auto cos = kernels::pairwise_cosine(kernels::to_matrix(centroids), options_.execution);
  for (std::size_t i = 0; i < cos.rows; ++i)
    d.centroid_cosine.emplace_back(cos.row(i).begin(), cos.row(i).end());
  d.sc_variant = options_.sc_variant == ScVariant::theme ? "theme" : "centroid";
  d.sc_kind = sc_kind_name(p.framework);
  return r;
}

std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> candidates, std::size_t n) {
  std::stable_sort(candidates.begin(), candidates.end(), [](const RankedCandidate& a, const RankedCandidate& b) {
    if (a.report.final != b.report.final) return a.report.final > b.report.final;
    if (a.report.sca != b.report.sca) return a.report.sca > b.report.sca;
    return a.generation_index < b.generation_index;
  });
  if (candidates.size() > n) candidates.resize(n);
  return candidates;
}

}  // namespace narrativeforge
