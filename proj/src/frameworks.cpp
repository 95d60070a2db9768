#include "narrativeforge/frameworks.hpp"

#include <map>

#include "narrativeforge/error.hpp"
#include "narrativeforge/schema.hpp"
#include "narrativeforge/text.hpp"

namespace narrativeforge {

std::string_view to_string(FrameworkKind kind) {
  switch (kind) {
    case FrameworkKind::parallel: return "parallel";
    case FrameworkKind::linear: return "linear";
    case FrameworkKind::coordinate: return "coordinate";
    case FrameworkKind::circular: return "circular";
  }
  return "parallel";
}

FrameworkKind framework_from_string(std::string_view s) {
  for (auto k : kAllFrameworks)
    if (to_string(k) == s) return k;
  fail(ErrorCode::validation, "unknown framework '" + std::string(s) +
                                  "' (expected parallel, linear, coordinate or circular)");
}

std::string_view to_string(Constraint c) {
  switch (c) {
    case Constraint::distinct_themes: return "distinct themes";
    case Constraint::ordered_clusters: return "ordered clusters";
    case Constraint::axes_present: return "axes present";
    case Constraint::quadrant_assigned: return "quadrant assigned";
    case Constraint::cyclic_order: return "cyclic order";
  }
  return "";
}

namespace {

std::vector<FrameworkSpec> make_catalog() {
  std::vector<FrameworkSpec> specs;

  specs.push_back(FrameworkSpec{
      FrameworkKind::parallel,
      "Parallel",
      "Within one Contribution Statement, Clusters show a non-overlapping relationship: each Cluster "
      "represents a distinct technical or methodological approach, or a different perspective for "
      "formulating the problem space, and together the Clusters address a central research "
      "challenge. Therefore, the Parallel Framework is ideal for showcasing multiple complementary "
      "facets of one contribution.",
      "Check that the Clusters show a non-overlapping relationship, each representing a distinct "
      "approach or perspective, and that together they address a central research challenge. Make "
      "sure no two Clusters describe the same facet.",
      {3, 6},
      false,
      {43, 53},
  });

  specs.push_back(FrameworkSpec{
      FrameworkKind::linear,
      "Linear",
      "Within one Contribution Statement, Clusters illustrate a sequential flow where papers are "
      "organized in a progressive line, highlighting how each stage builds upon insights from "
      "previous stages. Therefore, the Linear Framework is ideal for showcasing how initial "
      "explorations led to sophisticated outcomes or how works span different levels of "
      "advancement.",
      "Check that the Clusters illustrate a sequential flow where papers are organized in a "
      "progressive line, highlighting how each stage builds upon insights from previous stages. "
      "Make sure the Clusters are ideal for showcasing how initial explorations led to "
      "sophisticated outcomes or how works span different levels of advancement.",
      {3, 6},
      false,
      {5, 53},
  });

  specs.push_back(FrameworkSpec{
      FrameworkKind::coordinate,
      "Coordinate",
      "Within one Contribution Statement, Clusters are positioned within a conceptual space defined "
      "by two key dimensions that capture fundamental tensions in the field (for example, user "
      "control vs. automation, or expressiveness vs. efficiency). Each dimension is an axis with two "
      "opposing poles, and each Cluster sits in the quadrant formed by one pole of each axis. "
      "Therefore, the Coordinate Framework is ideal for showcasing the exploration of a design space "
      "or the tensions between competing factors.",
      "Check that the Clusters are positioned within the conceptual space defined by the two axes, "
      "that each Cluster sits in the quadrant matching its assigned poles, and that together the "
      "Clusters show how works exist at the intersections between concepts.",
      {3, 6},
      true,
      {4, 53},
  });

  specs.push_back(FrameworkSpec{
      FrameworkKind::circular,
      "Circular",
      "Within one Contribution Statement, each Cluster represents an interconnected phase that "
      "continuously informs the others, forming an iterative process or feedback loop in which the "
      "last Cluster feeds back into the first. Therefore, the Circular Framework is ideal for "
      "showcasing research grounded in iterative processes, design thinking, or user-centered "
      "development cycles, and how its facets mutually reinforce each other.",
      "Check that each Cluster represents an interconnected phase that continuously informs the "
      "others in the listed order, with the last Cluster feeding back into the first. Make sure the "
      "Clusters show how the facets mutually reinforce each other through iterative refinement.",
      {3, 6},
      false,
      {1, 53},
  });

  return specs;
}

}  // namespace

const std::vector<FrameworkSpec>& framework_catalog() {
  static const std::vector<FrameworkSpec> catalog = make_catalog();
  return catalog;
}

const FrameworkSpec& framework_spec(FrameworkKind kind) {
  return framework_catalog()[static_cast<std::size_t>(kind)];
}

bool ConstraintSet::contains(Constraint c) const {
  for (auto x : constraints)
    if (x == c) return true;
  return false;
}

ConstraintSet structural_requirements(FrameworkKind kind) {
  switch (kind) {
    case FrameworkKind::parallel: return {{Constraint::distinct_themes}};
    case FrameworkKind::linear: return {{Constraint::ordered_clusters}};
    case FrameworkKind::coordinate: return {{Constraint::axes_present, Constraint::quadrant_assigned}};
    case FrameworkKind::circular: return {{Constraint::cyclic_order}};
  }
  return {};
}

ValidationReport check_structure(const Perspective& p) {
  ValidationReport report;
  const auto reqs = structural_requirements(p.framework);

  if (reqs.contains(Constraint::distinct_themes)) {
    std::map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < p.clusters.size(); ++i) {
      const auto norm = text::to_lower_ascii(text::normalize_whitespace(p.clusters[i].cluster_theme));
      auto [it, inserted] = seen.emplace(norm, i);
      if (!inserted) {
        report.add(ViolationKind::duplicate_theme,
                   "duplicate theme: '" + p.clusters[i].cluster_theme + "' (clusters " +
                       std::to_string(it->second) + " and " + std::to_string(i) + ")");
      }
    }
  }

  if (reqs.contains(Constraint::axes_present)) {
    if (!p.axes) {
      report.add(ViolationKind::axes_required, "axes required");
    } else {
      const std::string poles[] = {p.axes->axis1.pole_a, p.axes->axis1.pole_b, p.axes->axis2.pole_a,
                                   p.axes->axis2.pole_b};
      bool ok = true;
      for (int i = 0; i < 4 && ok; ++i) {
        if (text::trim(poles[i]).empty()) ok = false;
        for (int j = i + 1; j < 4 && ok; ++j)
          if (text::to_lower_ascii(text::trim(poles[i])) == text::to_lower_ascii(text::trim(poles[j])))
            ok = false;
      }
      if (!ok) report.add(ViolationKind::invalid_poles, "axis poles must be four distinct non-empty labels");
    }
  }

  if (reqs.contains(Constraint::quadrant_assigned) && p.axes) {
    for (std::size_t i = 0; i < p.clusters.size(); ++i) {
      if (!p.axes->quadrant_of.count(i))
        report.add(ViolationKind::missing_quadrant, "missing quadrant: cluster " + std::to_string(i));
    }
    for (const auto& [idx, q] : p.axes->quadrant_of) {
      if (idx >= p.clusters.size())
        report.add(ViolationKind::missing_quadrant,
                   "quadrant assigned to nonexistent cluster " + std::to_string(idx));
    }
  }
  // ordered_clusters and cyclic_order hold by construction: the list order is
  // the narrative order and the cluster-count floor keeps a real cycle.
  return report;
}

}  // namespace narrativeforge
