#include "narrativeforge/llm.hpp"

#include <httplib.h>

#include <algorithm>
#include <fstream>
#include <json.hpp>
#include <regex>
#include <sstream>

#include "narrativeforge/error.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

std::string prompt_hash(const std::string& prompt) { return text::hex64(text::fnv1a64(prompt)); }

std::string classify_prompt(const std::string& prompt) {
  static const std::regex rules_re(R"(## Rules for (\w+) Framework)");
  static const std::regex key_re(R"re("key_to_modify":\s*"([a-z_]+?)\d*")re");
  std::smatch m;
  if (prompt.find("# OUTPUT FORMAT (strict JSON)") != std::string::npos &&
      std::regex_search(prompt, m, rules_re)) {
    return "topdown_" + text::to_lower_ascii(m[1].str());
  }
  if (prompt.find("# KEYS USED") != std::string::npos) {
    // The last match is the live key; the first is the schema example.
    std::string family;
    for (auto it = std::sregex_iterator(prompt.begin(), prompt.end(), key_re);
         it != std::sregex_iterator(); ++it)
      family = (*it)[1].str();
    if (family.empty() || family == "key_to_modify") return "bottomup";
    return "bottomup_" + family;
  }
  if (prompt.find("# RATIONALE STRATEGY") != std::string::npos) return "rationale";
  if (prompt.find("# TOPIC CATEGORIZATION") != std::string::npos) return "categorize";
  return {};
}

MockLlm::MockLlm(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir))
    fail(ErrorCode::not_found, "mock LLM fixture directory not found: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    by_key_[path.stem().string()] = buf.str();
  }
}

void MockLlm::add_exact(const std::string& prompt, std::string response) {
  by_key_[prompt_hash(prompt)] = std::move(response);
}

void MockLlm::add_for_task(const std::string& task, std::string response) {
  by_key_[task] = std::move(response);
}

std::string MockLlm::complete(const std::string& prompt, const LlmParams&) {
  ++calls_;
  const auto hash = prompt_hash(prompt);
  if (auto it = by_key_.find(hash); it != by_key_.end()) return it->second;
  const auto task = classify_prompt(prompt);
  if (!task.empty()) {
    if (auto it = by_key_.find(task); it != by_key_.end()) return it->second;
    const auto family = task.substr(0, task.find('_'));
    if (auto it = by_key_.find(family); it != by_key_.end()) return it->second;
  }
  fail(ErrorCode::transport,
       "mock LLM has no canned response for prompt " + hash + " (task '" + task + "')");
}

ScriptedLlm::ScriptedLlm(std::vector<std::string> responses) : responses_(std::move(responses)) {}

std::string ScriptedLlm::complete(const std::string& prompt, const LlmParams&) {
  std::lock_guard lock(mu_);
  prompts_.push_back(prompt);
  if (responses_.empty()) fail(ErrorCode::transport, "scripted LLM has no responses");
  const auto idx = std::min(prompts_.size() - 1, responses_.size() - 1);
  return responses_[idx];
}

std::vector<std::string> ScriptedLlm::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

std::size_t ScriptedLlm::calls() const {
  std::lock_guard lock(mu_);
  return prompts_.size();
}

HttpLlmClient::HttpLlmClient(Settings settings) : settings_(std::move(settings)) {}

std::string HttpLlmClient::request_body(const std::string& prompt, const LlmParams& params) const {
  nlohmann::json body = {
      {"model", settings_.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };
  if (params.seed) body["seed"] = *params.seed;
  return body.dump();
}

std::string HttpLlmClient::complete(const std::string& prompt, const LlmParams& params) {
  if (settings_.api_key.empty()) fail(ErrorCode::transport, "no LLM API key configured");
  httplib::Client client(settings_.base_url);
  client.set_read_timeout(settings_.timeout_seconds, 0);
  client.set_bearer_token_auth(settings_.api_key);
  auto res = client.Post(settings_.path, request_body(prompt, params), "application/json");
  if (!res) {
    throw Error(ErrorCode::transport, "LLM request failed: " + httplib::to_string(res.error()),
                /*retryable=*/true);
  }
  if (res->status == 429 || res->status >= 500) {
    throw Error(ErrorCode::transport, "LLM provider returned HTTP " + std::to_string(res->status),
                /*retryable=*/true);
  }
  if (res->status != 200)
    fail(ErrorCode::transport, "LLM provider returned HTTP " + std::to_string(res->status));
  try {
    auto j = nlohmann::json::parse(res->body);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::transport, std::string("unexpected LLM response shape: ") + e.what());
  }
}

}  // namespace narrativeforge
