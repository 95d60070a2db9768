#pragma once

#include <array>
#include <cstdint>
#include <json.hpp>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/embedding.hpp"
#include "narrativeforge/kernels.hpp"
#include "narrativeforge/schema.hpp"

namespace narrativeforge {

using kernels::Execution;

/// Cosine similarity clamped to [-1, 1]. Throws Error(embedding) for a zero
/// vector or mismatched dimensions.
double cosine_similarity(std::span<const float> u, std::span<const float> v);

// Maps a cosine in [-1, 1] onto [0, 1]: (c + 1) / 2.
double unit_map(double cosine);

enum class ScVariant { centroid, theme };

struct ScoringOptions {
  std::uint64_t seed = 0;
  std::size_t restarts = 8;
  ScVariant sc_variant = ScVariant::centroid;
  Execution execution = Execution::parallel;
};

/// Every embedding a perspective's metrics need, computed in one provider call.
struct PerspectiveEmbeddings {
  Embedding statement;
  std::vector<Embedding> themes;               // per cluster
  std::vector<std::vector<Embedding>> papers;  // per cluster, in papers_assign order
  std::optional<std::array<Embedding, 4>> poles;  // axis1 a/b, axis2 a/b
};

PerspectiveEmbeddings embed_perspective(const Perspective& p, const SelectionContext& ctx,
                                        EmbeddingProvider& emb);

double sca_score(const PerspectiveEmbeddings& e);
double icc_score(const PerspectiveEmbeddings& e);
double pcs_score(const PerspectiveEmbeddings& e);

double sca_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb);
double icc_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb);
double pcs_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb);

struct KMeansResult {
  std::vector<int> labels;
  double sse = 0.0;
  kernels::Matrix centroids;
  std::size_t best_restart = 0;
};

/// Lloyd's k-means with k-means++ seeding. Each restart draws from its own
/// stream derived from (seed, restart); the restart with the lowest SSE wins,
/// ties going to the earlier restart. Throws Error(validation) unless 1 <= k <= n.
KMeansResult kmeans_cluster(const std::vector<Embedding>& vectors, std::size_t k, std::uint64_t seed,
                            std::size_t restarts = 8, Execution exec = Execution::parallel);

/// Contingency-table ARI. Returns 1.0 when the expected and maximum index
/// coincide (both partitions trivial). Throws on length mismatch or n < 2.
double adjusted_rand_index(std::span<const int> a, std::span<const int> b);

struct AriDetails {
  double raw = 0.0;
  double normalized = 0.0;
  std::vector<int> assignment_labels;
  std::vector<int> kmeans_labels;
  double kmeans_sse = 0.0;
};

AriDetails ari_details(const PerspectiveEmbeddings& e, const ScoringOptions& options);
double ari_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb,
                 std::uint64_t seed);

// Member-paper mean per cluster, re-normalized.
std::vector<Embedding> cluster_centroids(const PerspectiveEmbeddings& e);

/// Framework-specific structural consistency.
///   parallel:   1 - mean pairwise unit_map(cos) between cluster vectors
///   linear:     share of triples i<j<k with cos(ci,cj) >= cos(ci,ck)
///   circular:   mean pairwise unit_map(cos) between cluster vectors
///   coordinate: per axis, mean over clusters of
///               (unit_map(cos to assigned pole) - unit_map(cos to opposite)) / 2 + 1/2,
///               averaged over both axes
/// Cluster vectors are centroids, or theme embeddings for ScVariant::theme.
double sc_score(const Perspective& p, const PerspectiveEmbeddings& e, ScVariant variant = ScVariant::centroid);
double sc_score(const Perspective& p, const SelectionContext& ctx, EmbeddingProvider& emb,
                ScVariant variant = ScVariant::centroid);

struct MetricTuple {
  double sca = 0.0;
  double icc = 0.0;
  double ari = 0.0;
  double pcs = 0.0;
  double sc = 0.0;
};

// 0.2 * (SCA + SC + ARI + PCS + ICC). Throws Error(validation) for inputs outside [0, 1].
double final_score(const MetricTuple& m);

struct ScoreDetails {
  double raw_ari = 0.0;
  std::vector<int> assignment_labels;
  std::vector<int> kmeans_labels;
  double kmeans_sse = 0.0;
  std::vector<double> statement_theme_cosine;  // per cluster
  std::vector<double> cluster_icc;             // per cluster
  std::vector<double> cluster_pcs;             // per cluster
  std::vector<std::vector<double>> centroids;
  std::vector<std::vector<double>> centroid_cosine;
  std::string sc_variant;
  std::string sc_kind;
};

struct ScoreReport {
  double sca = 0.0;
  double icc = 0.0;
  double ari = 0.0;
  double pcs = 0.0;
  double sc = 0.0;
  double final = 0.0;
  ScoreDetails details;
};

void to_json(nlohmann::json& j, const ScoreReport& r);
void from_json(const nlohmann::json& j, ScoreReport& r);

class Scorer {
 public:
  Scorer(EmbeddingProvider& embeddings, ScoringOptions options = {})
      : embeddings_(embeddings), options_(options) {}

  // Precondition: validate_perspective and check_structure are both clean.
  ScoreReport score(const Perspective& p, const SelectionContext& ctx) const;

  const ScoringOptions& options() const { return options_; }

 private:
  EmbeddingProvider& embeddings_;
  ScoringOptions options_;
};

struct RankedCandidate {
  Perspective perspective;
  ScoreReport report;
  std::size_t generation_index = 0;
};

/// Stable sort by final score descending, then SCA descending, then
/// generation index ascending; keeps the first `n`.
std::vector<RankedCandidate> rank_candidates(std::vector<RankedCandidate> candidates, std::size_t n = 4);

}  // namespace narrativeforge
