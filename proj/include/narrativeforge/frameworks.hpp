#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "narrativeforge/validation.hpp"

namespace narrativeforge {

struct Perspective;

enum class FrameworkKind { parallel, linear, coordinate, circular };

inline constexpr std::array<FrameworkKind, 4> kAllFrameworks = {
    FrameworkKind::parallel, FrameworkKind::linear, FrameworkKind::coordinate, FrameworkKind::circular};

// Lowercase wire name ("parallel", ...).
std::string_view to_string(FrameworkKind kind);
FrameworkKind framework_from_string(std::string_view s);

struct ClusterRange {
  std::size_t min = 3;
  std::size_t max = 6;
};

// How often the pattern occurred in the surveyed research talks.
struct Prevalence {
  int count = 0;
  int total = 0;
};

struct FrameworkSpec {
  FrameworkKind kind;
  std::string display_name;  // "Linear"
  // "Rules for <X> Framework" paragraph of the top-down prompt.
  std::string relation_text;
  // Step-2 relationship check of the bottom-up prompt.
  std::string relation_check_text;
  ClusterRange cluster_range;
  bool requires_axes = false;
  Prevalence prevalence;
};

const std::vector<FrameworkSpec>& framework_catalog();
const FrameworkSpec& framework_spec(FrameworkKind kind);

enum class Constraint {
  distinct_themes,    // no theme textually duplicates another
  ordered_clusters,   // list order is the narrative order
  axes_present,       // AxisPair with four distinct, non-empty poles
  quadrant_assigned,  // every cluster has a quadrant
  cyclic_order,       // successor of the last cluster is the first
};

std::string_view to_string(Constraint c);

struct ConstraintSet {
  std::vector<Constraint> constraints;
  bool contains(Constraint c) const;
};

ConstraintSet structural_requirements(FrameworkKind kind);

// Violations of the framework's structural constraints only; assumes the
// perspective already passed validate_perspective.
ValidationReport check_structure(const Perspective& p);

}  // namespace narrativeforge
