#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/frameworks.hpp"
#include "narrativeforge/llm.hpp"
#include "narrativeforge/schema.hpp"
#include "narrativeforge/scoring.hpp"

namespace narrativeforge {

inline constexpr std::size_t kSparkCount = 4;

struct DroppedCandidate {
  std::size_t index = 0;  // position in the LLM response
  std::vector<std::string> reasons;
};

struct TopdownParse {
  std::vector<Perspective> perspectives;
  std::vector<std::size_t> generation_index;  // parallel to perspectives
  std::vector<DroppedCandidate> dropped;
  std::vector<std::string> repair_steps;
};

struct CandidateSet {
  FrameworkKind framework = FrameworkKind::parallel;
  std::vector<RankedCandidate> candidates;  // ranked, at most kSparkCount
  std::vector<std::string> warnings;
  std::vector<DroppedCandidate> dropped;
  std::size_t survivors = 0;
};

void to_json(nlohmann::json& j, const DroppedCandidate& d);
void from_json(const nlohmann::json& j, DroppedCandidate& d);
void to_json(nlohmann::json& j, const RankedCandidate& c);
void from_json(const nlohmann::json& j, RankedCandidate& c);
void to_json(nlohmann::json& j, const CandidateSet& s);
void from_json(const nlohmann::json& j, CandidateSet& s);

struct TopdownOptions {
  LlmParams params{0.7, 8192, std::nullopt};
  std::size_t keep = kSparkCount;
  std::size_t transport_retries = 2;
  // Re-query the LLM when fewer than `keep` candidates survive.
  bool retry_on_shortfall = false;
  std::size_t shortfall_retries = 1;
};

struct UpdateOptions {
  LlmParams params{0.0, 1024, std::nullopt};
  std::size_t retries = 2;
  std::size_t transport_retries = 2;
};

std::string build_topdown_prompt(const SelectionContext& ctx, const FrameworkSpec& spec);

/// Repairs and parses a top-down response. Each candidate that fails
/// validate_perspective or check_structure is dropped with its reasons.
/// Throws Error(generation) when nothing survives.
TopdownParse parse_topdown_response(const std::string& text, const SelectionContext& ctx,
                                    const FrameworkSpec& spec);

/// Prompt, parse, score every survivor, rank, keep the top `options.keep`.
CandidateSet generate_candidates(const SelectionContext& ctx, FrameworkKind kind, LlmClient& llm,
                                 const Scorer& scorer, const TopdownOptions& options = {});

// `feedback` describes why the previous attempt was rejected; empty on the first try.
std::string build_bottomup_prompt(const Perspective& p, const FieldKey& key, const SelectionContext& ctx,
                                  const std::string& feedback = {});

/// Extracts the new value from a bottom-up response: one line of text for
/// statement/theme keys, a JSON id array for assignment keys. Lead-in prose,
/// quotes and code fences are stripped; anything still ambiguous throws
/// Error(parse).
PartialValue parse_bottomup_response(const std::string& text, const FieldKey& key);

struct UpdateOutcome {
  Perspective perspective;
  std::size_t attempts = 0;
  bool no_op = false;
  std::vector<std::string> rejected;  // reasons for discarded attempts
};

/// Regenerates one unlocked field. Invalid proposals are retried up to
/// `options.retries` times with the violation appended to the prompt.
/// Locked keys throw Error(lock_violation) before any LLM call; exhausting the
/// retries throws Error(update).
UpdateOutcome request_partial_update(const Perspective& p, const FieldKey& key, const SelectionContext& ctx,
                                     LlmClient& llm, const UpdateOptions& options = {});

// Calls llm.complete, retrying retryable transport errors.
std::string complete_with_retry(LlmClient& llm, const std::string& prompt, const LlmParams& params,
                                std::size_t retries);

}  // namespace narrativeforge
