#pragma once

#include <filesystem>
#include <json.hpp>
#include <map>
#include <string>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/schema.hpp"

namespace nf_test {

using namespace narrativeforge;

// Papers "p1".."pn" with distinct titles and abstracts.
Corpus make_corpus(std::size_t n);
SelectionContext make_ctx(std::size_t n, const std::string& focus = "interactive systems",
                          const std::string& intent = "explain the research arc");

/// Valid perspective over ctx's papers, split into `clusters` contiguous
/// groups. Coordinate perspectives get axes with quadrants cycling aa, ab, ba, bb.
Perspective make_perspective(FrameworkKind kind, std::size_t clusters, const SelectionContext& ctx,
                             const std::string& tag = "A");

// {"contribution_statements": [...]} as an LLM would return it.
std::string topdown_response(const std::vector<Perspective>& ps);

// Candidate JSON without the framework and locks fields the LLM never sends.
nlohmann::json llm_candidate(const Perspective& p);

std::filesystem::path fixture_dir();
std::string read_fixture(const std::string& relative);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

/// Independent zip reader: walks the central directory, inflates every entry
/// and checks its CRC. Throws std::runtime_error on any structural problem.
std::map<std::string, std::string> read_zip(const std::string& bytes);

// Returns an empty string when `xml` is well-formed, else a description of the first problem.
std::string xml_problem(const std::string& xml);

// Pair-counting ARI: counts agreeing and disagreeing pairs directly.
double ari_pair_oracle(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace nf_test
