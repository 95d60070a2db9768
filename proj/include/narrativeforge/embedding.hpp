#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace narrativeforge {

using Embedding = std::vector<float>;

// Outputs are unit-normalized and deterministic per input text. Implementations
// must be safe to call concurrently.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<Embedding> embed(std::span<const std::string> texts) = 0;

  Embedding embed_one(const std::string& text);
};

/// Seeded hash embedding. Each text maps to a pseudo-random unit vector drawn
/// from a splitmix64 stream keyed by (text, seed); distinct texts are nearly
/// orthogonal for large dimensions. Individual texts can be pinned to fixed
/// vectors to build planted fixtures.
class StubEmbedding : public EmbeddingProvider {
 public:
  explicit StubEmbedding(std::size_t dimension = 64, std::uint64_t seed = 0);

  // Pinned vectors are normalized on insert. Not thread-safe against embed().
  void pin(const std::string& text, std::vector<float> vec);

  std::size_t dimension() const override { return dim_; }
  std::vector<Embedding> embed(std::span<const std::string> texts) override;

  Embedding hashed(const std::string& text) const;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
  std::map<std::string, Embedding> pinned_;
};

/// Embeddings endpoint of an OpenAI-compatible server.
class HttpEmbeddingProvider : public EmbeddingProvider {
 public:
  struct Settings {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/embeddings";
    std::string model = "all-MiniLM-L6-v2";
    std::string api_key;
    std::size_t dimension = 384;
    int timeout_seconds = 60;
  };

  explicit HttpEmbeddingProvider(Settings settings);

  std::size_t dimension() const override { return settings_.dimension; }
  std::vector<Embedding> embed(std::span<const std::string> texts) override;

 private:
  Settings settings_;
};

void normalize_in_place(Embedding& v);

}  // namespace narrativeforge
