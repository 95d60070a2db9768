#pragma once

#include <string>
#include <vector>

namespace narrativeforge {

enum class ViolationKind {
  uncovered_paper,
  doubly_assigned,
  unknown_id,
  duplicate_in_cluster,
  cluster_count,
  empty_statement,
  empty_theme,
  empty_cluster,
  axes_required,
  axes_forbidden,
  stale_lock,
  duplicate_theme,
  invalid_poles,
  missing_quadrant,
};

struct Violation {
  ViolationKind kind;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  bool has(ViolationKind kind) const;
  std::vector<std::string> messages() const;
  // Messages joined with "; ".
  std::string summary() const;

  void add(ViolationKind kind, std::string message) { violations.push_back({kind, std::move(message)}); }
  void merge(const ValidationReport& other);
};

}  // namespace narrativeforge
