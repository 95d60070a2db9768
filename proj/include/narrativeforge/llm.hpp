#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace narrativeforge {

struct LlmParams {
  double temperature = 0.0;
  int max_tokens = 4096;
  std::optional<std::uint64_t> seed;
};

// Implementations must tolerate concurrent complete() calls.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt, const LlmParams& params) = 0;
};

// Stable key for canned-response lookup: 16 hex digits of FNV-1a over the prompt bytes.
std::string prompt_hash(const std::string& prompt);

// Task name inferred from a prompt built by this library, e.g. "topdown_linear",
// "bottomup_cluster_theme", "rationale", "categorize". Empty when unrecognized.
std::string classify_prompt(const std::string& prompt);

/// Replays canned responses. Lookup order: exact prompt hash, then the task
/// name from classify_prompt(), then the task family ("topdown", "bottomup").
/// A directory fixture holds `<key>.txt` files with the same keys.
class MockLlm : public LlmClient {
 public:
  MockLlm() = default;
  // Loads every `<key>.txt` in `dir`; throws Error(not_found) if it is missing.
  explicit MockLlm(const std::filesystem::path& dir);

  void add_exact(const std::string& prompt, std::string response);
  void add_for_task(const std::string& task, std::string response);

  std::string complete(const std::string& prompt, const LlmParams& params) override;

  std::size_t calls() const { return calls_.load(); }

 private:
  std::map<std::string, std::string> by_key_;
  std::atomic<std::size_t> calls_{0};
};

/// Returns scripted responses in order and records every prompt it saw.
/// Once the script runs out the last response repeats.
class ScriptedLlm : public LlmClient {
 public:
  explicit ScriptedLlm(std::vector<std::string> responses);

  std::string complete(const std::string& prompt, const LlmParams& params) override;

  std::vector<std::string> prompts() const;
  std::size_t calls() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
};

/// Chat-completions client for an OpenAI-compatible endpoint.
class HttpLlmClient : public LlmClient {
 public:
  struct Settings {
    std::string base_url = "https://api.openai.com";
    std::string path = "/v1/chat/completions";
    std::string model = "o3-mini";
    std::string api_key;
    int timeout_seconds = 120;
  };

  explicit HttpLlmClient(Settings settings);

  std::string complete(const std::string& prompt, const LlmParams& params) override;

  // Request body sent for `prompt`; exposed for tests.
  std::string request_body(const std::string& prompt, const LlmParams& params) const;

 private:
  Settings settings_;
};

}  // namespace narrativeforge
