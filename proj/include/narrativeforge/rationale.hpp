#pragma once

#include <json.hpp>
#include <string>
#include <string_view>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/llm.hpp"
#include "narrativeforge/schema.hpp"

namespace narrativeforge {

enum class RhetoricalMode { ethos, pathos, logos };

std::string_view to_string(RhetoricalMode m);

struct RationaleStrategy {
  RhetoricalMode category;
  std::string name;
  std::string definition;

  bool operator==(const RationaleStrategy&) const = default;
};

// Eleven strategies: ethos 3, pathos 4, logos 4.
const std::vector<RationaleStrategy>& strategy_catalog();

// Lookup by exact name ("Big Name's Quote"); throws Error(not_found).
const RationaleStrategy& find_strategy(std::string_view name);

struct RationaleDraft {
  RationaleStrategy strategy;
  std::string narration;
  std::string perspective_ref;  // perspective_fingerprint of the source perspective

  bool operator==(const RationaleDraft&) const = default;
};

void to_json(nlohmann::json& j, const RationaleStrategy& s);
void from_json(const nlohmann::json& j, RationaleStrategy& s);
void to_json(nlohmann::json& j, const RationaleDraft& d);
void from_json(const nlohmann::json& j, RationaleDraft& d);

std::string build_rationale_prompt(const Perspective& p, const RationaleStrategy& s, const SelectionContext& ctx);

struct RationaleOptions {
  LlmParams params{0.7, 1024, std::nullopt};
  std::size_t retries = 1;
};

/// Asks for 3-6 sentences of spoken narration arguing the perspective's
/// significance with the given strategy. Empty output is retried; still empty
/// after the retries throws Error(generation).
RationaleDraft generate_rationale(const Perspective& p, const RationaleStrategy& s, const SelectionContext& ctx,
                                  LlmClient& llm, const RationaleOptions& options = {});

// One draft per strategy, in the order given.
std::vector<RationaleDraft> generate_rationales(const Perspective& p, const std::vector<RationaleStrategy>& strategies,
                                                const SelectionContext& ctx, LlmClient& llm,
                                                const RationaleOptions& options = {});

}  // namespace narrativeforge
