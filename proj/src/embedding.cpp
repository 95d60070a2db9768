#include "narrativeforge/embedding.hpp"

#include <httplib.h>

#include <cmath>
#include <json.hpp>

#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

void normalize_in_place(Embedding& v) {
  double norm = 0.0;
  for (float x : v) norm += static_cast<double>(x) * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) fail(ErrorCode::embedding, "cannot normalize a zero vector");
  for (auto& x : v) x = static_cast<float>(x / norm);
}

Embedding EmbeddingProvider::embed_one(const std::string& text) {
  std::vector<std::string> one{text};
  return embed(one).front();
}

StubEmbedding::StubEmbedding(std::size_t dimension, std::uint64_t seed) : dim_(dimension), seed_(seed) {
  if (dim_ == 0) fail(ErrorCode::embedding, "embedding dimension must be positive");
}

void StubEmbedding::pin(const std::string& text, std::vector<float> vec) {
  if (vec.size() != dim_) fail(ErrorCode::embedding, "pinned vector has wrong dimension");
  normalize_in_place(vec);
  pinned_[text] = std::move(vec);
}

Embedding StubEmbedding::hashed(const std::string& text) const {
  std::uint64_t state = text::fnv1a64(text) ^ (seed_ * 0xd1b54a32d192ed03ULL);
  Embedding v(dim_);
  for (auto& x : v) {
    const double u = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53;
    x = static_cast<float>(2.0 * u - 1.0);
  }
  normalize_in_place(v);
  return v;
}

std::vector<Embedding> StubEmbedding::embed(std::span<const std::string> texts) {
  std::vector<Embedding> out;
  out.reserve(texts.size());
  for (const auto& t : texts) {
    if (auto it = pinned_.find(t); it != pinned_.end())
      out.push_back(it->second);
    else
      out.push_back(hashed(t));
  }
  return out;
}

HttpEmbeddingProvider::HttpEmbeddingProvider(Settings settings) : settings_(std::move(settings)) {}

std::vector<Embedding> HttpEmbeddingProvider::embed(std::span<const std::string> texts) {
  if (texts.empty()) return {};
  httplib::Client client(settings_.base_url);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  if (!settings_.api_key.empty()) client.set_bearer_token_auth(settings_.api_key);
  nlohmann::json body = {{"model", settings_.model},
                         {"input", std::vector<std::string>(texts.begin(), texts.end())}};
  auto res = client.Post(settings_.path, body.dump(), "application/json");
  if (!res) {
    throw Error(ErrorCode::embedding, "embedding request failed: " + httplib::to_string(res.error()),
                /*retryable=*/true);
  }
  if (res->status != 200)
    fail(ErrorCode::embedding, "embedding provider returned HTTP " + std::to_string(res->status));
  std::vector<Embedding> out;
  try {
    auto j = nlohmann::json::parse(res->body);
    for (const auto& item : j.at("data")) {
      auto v = item.at("embedding").get<Embedding>();
      if (v.size() != settings_.dimension)
        fail(ErrorCode::embedding, "embedding provider returned dimension " + std::to_string(v.size()));
      normalize_in_place(v);
      out.push_back(std::move(v));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::embedding, std::string("unexpected embedding response shape: ") + e.what());
  }
  if (out.size() != texts.size()) fail(ErrorCode::embedding, "embedding count mismatch");
  return out;
}

}  // namespace narrativeforge
