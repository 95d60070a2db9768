#pragma once

#include <compare>
#include <map>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "narrativeforge/corpus.hpp"
#include "narrativeforge/frameworks.hpp"
#include "narrativeforge/validation.hpp"

namespace narrativeforge {

enum class FieldFamily { contribution_statement, cluster_theme, papers_assign };

/// One lockable/editable schema field: the statement, or a cluster's theme or
/// assignment list. Serialized in the flattened form used by the update prompt
/// ("contribution_statement", "cluster_theme0", "papers_assign2").
struct FieldKey {
  FieldFamily family = FieldFamily::contribution_statement;
  std::size_t index = 0;  // ignored for contribution_statement

  static FieldKey statement() { return {FieldFamily::contribution_statement, 0}; }
  static FieldKey theme(std::size_t i) { return {FieldFamily::cluster_theme, i}; }
  static FieldKey assignment(std::size_t i) { return {FieldFamily::papers_assign, i}; }

  // Accepts the singular alias "paper_assignN".
  static FieldKey parse(std::string_view s);
  std::string str() const;

  bool is_text() const { return family != FieldFamily::papers_assign; }

  friend std::strong_ordering operator<=>(const FieldKey& a, const FieldKey& b) {
    if (a.family != b.family) return a.family <=> b.family;
    if (a.family == FieldFamily::contribution_statement) return std::strong_ordering::equal;
    return a.index <=> b.index;
  }
  friend bool operator==(const FieldKey& a, const FieldKey& b) { return (a <=> b) == 0; }
};

struct Cluster {
  std::string cluster_theme;
  std::string cluster_description;
  std::vector<std::string> papers_assign;

  bool operator==(const Cluster&) const = default;
};

enum class Pole { a, b };

struct Axis {
  std::string pole_a;
  std::string pole_b;

  const std::string& pole(Pole p) const { return p == Pole::a ? pole_a : pole_b; }
  bool operator==(const Axis&) const = default;
};

struct Quadrant {
  Pole side1 = Pole::a;
  Pole side2 = Pole::a;

  bool operator==(const Quadrant&) const = default;
};

struct AxisPair {
  Axis axis1;
  Axis axis2;
  std::map<std::size_t, Quadrant> quadrant_of;  // cluster index -> quadrant

  bool operator==(const AxisPair&) const = default;
};

using LockSet = std::set<FieldKey>;

struct Perspective {
  std::string contribution_statement;
  std::string contribution_statement_description;
  std::vector<Cluster> clusters;
  FrameworkKind framework = FrameworkKind::parallel;
  std::optional<AxisPair> axes;  // present iff framework == coordinate
  LockSet locks;

  bool is_locked(const FieldKey& k) const { return locks.count(k) != 0; }
  bool has_field(const FieldKey& k) const;
  std::size_t paper_count() const;

  bool operator==(const Perspective&) const = default;
};

using PartialValue = std::variant<std::string, std::vector<std::string>>;

PartialValue field_value(const Perspective& p, const FieldKey& key);

struct UpdatePayload {
  // Flattened fields in cluster order, then "axes" (coordinate only), then key_to_modify.
  nlohmann::ordered_json fields;
  FieldKey key_to_modify;

  std::string dump(int indent = 2) const { return fields.dump(indent); }
};

void to_json(nlohmann::json& j, const Cluster& c);
void from_json(const nlohmann::json& j, Cluster& c);
void to_json(nlohmann::json& j, const AxisPair& a);
void from_json(const nlohmann::json& j, AxisPair& a);
void to_json(nlohmann::json& j, const Perspective& p);
void from_json(const nlohmann::json& j, Perspective& p);

// Content hash of the canonical JSON; used as a stable perspective reference.
std::string perspective_fingerprint(const Perspective& p);

/// Partition, cluster-count, non-empty-text and axes-presence checks against
/// the selection. Violations are returned as data.
ValidationReport validate_perspective(const Perspective& p, const SelectionContext& ctx);

// Throws Error(validation) for keys that do not refer to an existing field.
Perspective set_lock(const Perspective& p, const FieldKey& key, bool locked);

UpdatePayload flatten_for_update(const Perspective& p, const FieldKey& key_to_modify);

// Rebuilds statement, themes, assignments and axes from a payload. Descriptions
// and locks are not part of the payload and come back empty.
Perspective unflatten_update(const UpdatePayload& payload, FrameworkKind framework);

/// Replaces exactly one field. Locked keys throw Error(lock_violation); values of
/// the wrong type, empty text, and assignment lists that break the partition
/// throw Error(validation).
Perspective apply_partial_value(const Perspective& p, const FieldKey& key, const PartialValue& value,
                                const SelectionContext& ctx);

/// Replaces several assignment lists at once (a paper moved between clusters
/// touches two lists). Same lock and partition rules as apply_partial_value.
Perspective apply_assignment_edit(const Perspective& p,
                                  const std::map<std::size_t, std::vector<std::string>>& lists,
                                  const SelectionContext& ctx);

}  // namespace narrativeforge
